//! Selection (tap, legend, lasso, axis tap) and navigation (focus, remove).

use std::collections::BTreeSet;

use thiserror::Error;

use crate::chart::{auto_domains, hit_test, ChartError, ChartSpec, Domain, HitTarget, MarkId, MarkScene};
use crate::data::{Dataset, RowId};
use crate::geom::{polygon_area, polygon_contains, Point};
use crate::view::{DomainOverrides, Provenance, Selection, ViewState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectError {
    #[error("nothing selectable at this position")]
    NoTarget,
    #[error("focus requires a non-empty selection")]
    FocusRequiresSelection,
    #[error("removing the selection would leave the view empty")]
    RemoveWouldEmptyView,
    #[error(transparent)]
    Chart(#[from] ChartError),
}

/// Adds `rows` unless all are already selected, in which case removes them.
fn toggle(current: &Selection, rows: &BTreeSet<RowId>, provenance: Provenance) -> Selection {
    let mut next = current.row_ids().clone();
    if rows.is_subset(&next) {
        next.retain(|r| !rows.contains(r));
    } else {
        next.extend(rows.iter().copied());
    }
    Selection::new(next, provenance)
}

pub fn tap_select(scene: &MarkScene, current: &Selection, pos: Point, tolerance: f64) -> Result<Selection, SelectError> {
    match hit_test(scene, pos, tolerance) {
        HitTarget::Mark { id } => tap_mark(scene, current, id),
        _ => Err(SelectError::NoTarget),
    }
}

pub fn tap_mark(scene: &MarkScene, current: &Selection, id: MarkId) -> Result<Selection, SelectError> {
    let mark = scene.mark(id).ok_or(SelectError::NoTarget)?;
    Ok(toggle(current, &mark.row_ids.iter().copied().collect(), Provenance::Tap))
}

/// Toggles every visible row whose color value is `category`.
pub fn legend_select(
    scene: &MarkScene,
    spec: &ChartSpec,
    data: &Dataset,
    view: &ViewState,
    current: &Selection,
    category: &str,
) -> Result<Selection, SelectError> {
    scene.legend_entry(category).ok_or(SelectError::NoTarget)?;
    let color = spec.encoding.color.as_ref().ok_or(SelectError::NoTarget)?;
    let col = data.column(&color.field).ok_or(SelectError::NoTarget)?;
    let rows: BTreeSet<RowId> = view
        .visible
        .iter()
        .copied()
        .filter(|&r| data.value(r, col).key() == category)
        .collect();
    if rows.is_empty() {
        return Ok(current.clone());
    }
    Ok(toggle(current, &rows, Provenance::Legend))
}

/// True when the polygon has fewer than three distinct vertices or no area.
pub fn is_degenerate(polygon: &[Point]) -> bool {
    let mut distinct: Vec<Point> = Vec::new();
    for &p in polygon {
        if !distinct.contains(&p) {
            distinct.push(p);
            if distinct.len() >= 3 {
                break;
            }
        }
    }
    distinct.len() < 3 || polygon_area(polygon).abs() < 1e-9
}

/// Replaces the selection with marks whose center lies inside or on the polygon.
pub fn lasso_select(scene: &MarkScene, polygon: &[Point]) -> Selection {
    if is_degenerate(polygon) {
        return Selection::empty();
    }
    let rows = scene
        .marks
        .iter()
        .filter(|m| polygon_contains(polygon, m.center))
        .flat_map(|m| m.row_ids.iter().copied())
        .collect();
    Selection::new(rows, Provenance::Lasso)
}

/// Replaces the selection with the rows of the actively inspected marks, or
/// leaves it unchanged when nothing is being inspected.
pub fn axis_tap_select(scene: &MarkScene, active: &BTreeSet<MarkId>, current: &Selection) -> Selection {
    if active.is_empty() {
        return current.clone();
    }
    let rows = active
        .iter()
        .filter_map(|&id| scene.mark(id))
        .flat_map(|m| m.row_ids.iter().copied())
        .collect();
    Selection::new(rows, Provenance::AxisTap)
}

/// Keeps only the selected rows and fits the scales to them.
pub fn focus(view: &ViewState, spec: &ChartSpec, data: &Dataset) -> Result<ViewState, SelectError> {
    if view.selection.is_empty() {
        return Err(SelectError::FocusRequiresSelection);
    }
    let rows: Vec<RowId> = view.selection.row_ids().iter().copied().collect();
    let (x, y) = auto_domains(spec, data, &rows)?;
    // Keep band order consistent with the unfocused chart.
    let x = match x {
        Domain::Band { categories } => {
            let all: Vec<RowId> = data.row_ids().collect();
            let (full, _) = auto_domains(spec, data, &all)?;
            match full {
                Domain::Band { categories: order } => Domain::Band {
                    categories: order.into_iter().filter(|c| categories.contains(c)).collect(),
                },
                other => other,
            }
        }
        other => other,
    };
    Ok(ViewState {
        visible: view.selection.row_ids().clone(),
        overrides: DomainOverrides { x: Some(x), y: Some(y) },
        selection: Selection::empty(),
        aggregate: view.aggregate.clone(),
    })
}

/// Removes the selected rows, keeping scale domains.
pub fn remove_selection(view: &ViewState) -> Result<ViewState, SelectError> {
    if view.selection.is_empty() {
        return Ok(view.clone());
    }
    let visible: BTreeSet<RowId> = view.visible.difference(view.selection.row_ids()).copied().collect();
    if visible.is_empty() {
        return Err(SelectError::RemoveWouldEmptyView);
    }
    Ok(ViewState {
        visible,
        overrides: view.overrides.clone(),
        selection: Selection::empty(),
        aggregate: view.aggregate.clone(),
    })
}
