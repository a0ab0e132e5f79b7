//! Axis inspection: lines step evenly over the distinct values along an axis
//! instead of tracking the nearest mark.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::chart::{ChartSpec, ChartType, Mark, MarkId, MarkScene};
use crate::data::{Dataset, RowId, Value};
use crate::geom::{Point, Rect};
use crate::gesture::PointerId;

/// Marks whose screen coordinates along the axis lie within this distance of
/// a group's first member share one step.
pub const GROUP_EPSILON_DIP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum InspectMode {
    TwoFinger,
    Joystick,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InspectError {
    #[error("step count must be positive")]
    EmptySteps,
    #[error("no visible marks to inspect")]
    InspectionUnavailable,
    #[error("this chart cannot be inspected along {0:?}")]
    AxisUnavailable(Axis),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InspectionLine {
    pub axis: Axis,
    pub owner: Option<PointerId>,
    /// Finger position along the inspection range, in [0, 1].
    pub fraction: f64,
    pub step_count: usize,
    pub step_index: usize,
    pub snapped_value: Value,
    /// Screen coordinate (x for the x line, y for the y line) the line is drawn at.
    pub position: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JoystickSession {
    pub pointer: PointerId,
    pub origin: Point,
    pub thumb_range: Rect,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InspectionState {
    pub joystick_enabled: bool,
    /// In creation order; the first line is the primary one.
    pub lines: Vec<InspectionLine>,
    pub active_mark_ids: BTreeSet<MarkId>,
    pub joystick: Option<JoystickSession>,
}

impl InspectionState {
    pub fn mode(&self) -> InspectMode {
        if self.joystick.is_some() {
            InspectMode::Joystick
        } else {
            InspectMode::TwoFinger
        }
    }

    pub fn is_active(&self) -> bool {
        !self.lines.is_empty()
    }

    pub fn line(&self, axis: Axis) -> Option<&InspectionLine> {
        self.lines.iter().find(|l| l.axis == axis)
    }

    /// Drops lines and any joystick session; keeps the joystick toggle.
    pub fn cleared(&self) -> Self {
        Self {
            joystick_enabled: self.joystick_enabled,
            ..Self::default()
        }
    }
}

/// `clamp(floor(fraction * step_count), 0, step_count - 1)`, computed exactly.
///
/// The product is formed in integer arithmetic from the float's mantissa so
/// boundaries fall exactly at multiples of `1 / step_count`.
pub fn even_step_index(fraction: f64, step_count: usize) -> Result<usize, InspectError> {
    if step_count == 0 {
        return Err(InspectError::EmptySteps);
    }
    let f = if fraction.is_nan() { 0.0 } else { fraction.clamp(0.0, 1.0) };
    let bits = f.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    };
    let product = mantissa as u128 * step_count as u128;
    let floor = if exp >= 0 {
        product << exp
    } else if -exp >= 128 {
        0
    } else {
        product >> (-exp)
    };
    Ok((floor.min(step_count as u128 - 1)) as usize)
}

/// Fraction of the plot range covered by `pos` along `axis`, with y growing upward.
pub fn axis_fraction(scene: &MarkScene, axis: Axis, pos: Point) -> f64 {
    let plot = scene.plot;
    let f = match axis {
        Axis::X => (pos.x - plot.x0) / plot.width(),
        Axis::Y => (plot.y1 - pos.y) / plot.height(),
    };
    f.clamp(0.0, 1.0)
}

/// Thumb-range box of `fraction` times the plot size, centred at `origin` and
/// shifted to lie inside the viewport.
pub fn thumb_range(scene: &MarkScene, origin: Point, fraction: f64) -> Rect {
    let (w, h) = (scene.plot.width() * fraction, scene.plot.height() * fraction);
    let vp = scene.viewport;
    let fit = |c: f64, size: f64, lo: f64, hi: f64| {
        let start = c - size / 2.0;
        if size >= hi - lo {
            lo
        } else {
            start.clamp(lo, hi - size)
        }
    };
    let x0 = fit(origin.x, w, vp.x0, vp.x1);
    let y0 = fit(origin.y, h, vp.y0, vp.y1);
    Rect::new(x0, y0, x0 + w, y0 + h)
}

/// Maps a finger position inside the thumb-range box to axis fractions.
pub fn joystick_map(pos: Point, thumb: Rect) -> (f64, f64) {
    let fx = (pos.x - thumb.x0) / thumb.width();
    let fy = 1.0 - (pos.y - thumb.y0) / thumb.height();
    (fx.clamp(0.0, 1.0), fy.clamp(0.0, 1.0))
}

struct Group<'a> {
    marks: Vec<&'a Mark>,
}

fn axis_key(mark: &Mark, axis: Axis) -> f64 {
    match axis {
        Axis::X => mark.center.x,
        // Screen y grows downward; data order is the reverse.
        Axis::Y => -mark.center.y,
    }
}

/// Groups candidate marks by coordinate along `axis`, in ascending data order.
fn group_marks<'a>(candidates: &[&'a Mark], axis: Axis) -> Vec<Group<'a>> {
    let mut sorted: Vec<&Mark> = candidates
        .iter()
        .copied()
        .filter(|m| axis_key(m, axis).is_finite())
        .collect();
    sorted.sort_by(|a, b| axis_key(a, axis).total_cmp(&axis_key(b, axis)).then(a.id.cmp(&b.id)));
    let mut groups: Vec<Group> = Vec::new();
    for m in sorted {
        match groups.last_mut() {
            Some(g) if axis_key(m, axis) - axis_key(g.marks[0], axis) <= GROUP_EPSILON_DIP => g.marks.push(m),
            _ => groups.push(Group { marks: vec![m] }),
        }
    }
    groups
}

fn axis_supported(scene: &MarkScene, axis: Axis) -> bool {
    !(scene.chart_type == ChartType::Bar && axis == Axis::Y)
}

/// Re-resolves every line against `scene`: the primary line steps over all
/// marks, a secondary line over the primary line's current group.
fn resolve(scene: &MarkScene, mut state: InspectionState) -> Result<InspectionState, InspectError> {
    let mut candidates: Vec<&Mark> = scene.marks.iter().collect();
    if candidates.is_empty() {
        return Err(InspectError::InspectionUnavailable);
    }
    for line in &mut state.lines {
        let groups = group_marks(&candidates, line.axis);
        if groups.is_empty() {
            return Err(InspectError::InspectionUnavailable);
        }
        let index = even_step_index(line.fraction, groups.len())?;
        let first = groups[index].marks[0];
        line.step_count = groups.len();
        line.step_index = index;
        line.snapped_value = match line.axis {
            Axis::X => first.x_value.clone(),
            Axis::Y => Value::Number(first.y_value),
        };
        line.position = match line.axis {
            Axis::X => first.center.x,
            Axis::Y => first.center.y,
        };
        candidates = groups.into_iter().nth(index).map(|g| g.marks).unwrap_or_default();
    }
    state.active_mark_ids = if state.lines.is_empty() {
        BTreeSet::new()
    } else {
        candidates.iter().map(|m| m.id).collect()
    };
    Ok(state)
}

fn set_fraction(state: &mut InspectionState, axis: Axis, owner: Option<PointerId>, fraction: f64) {
    match state.lines.iter_mut().find(|l| l.axis == axis) {
        Some(line) => {
            line.owner = owner;
            line.fraction = fraction;
        }
        None => state.lines.push(InspectionLine {
            axis,
            owner,
            fraction,
            step_count: 0,
            step_index: 0,
            snapped_value: Value::Number(0.0),
            position: 0.0,
        }),
    }
}

/// Moves (or creates) the `axis` line to the finger at `pos`.
pub fn update_inspection(
    scene: &MarkScene,
    state: &InspectionState,
    axis: Axis,
    owner: Option<PointerId>,
    pos: Point,
) -> Result<InspectionState, InspectError> {
    if !axis_supported(scene, axis) {
        return Err(InspectError::AxisUnavailable(axis));
    }
    let mut next = state.clone();
    set_fraction(&mut next, axis, owner, axis_fraction(scene, axis, pos));
    resolve(scene, next)
}

/// Begins a single-finger session anchored at `origin`.
pub fn start_joystick(
    scene: &MarkScene,
    state: &InspectionState,
    pointer: PointerId,
    origin: Point,
    thumb_fraction: f64,
) -> Result<InspectionState, InspectError> {
    let mut next = state.clone();
    next.joystick = Some(JoystickSession {
        pointer,
        origin,
        thumb_range: thumb_range(scene, origin, thumb_fraction),
    });
    update_joystick(scene, &next, origin)
}

/// Drives both lines (x first) from the joystick finger at `pos`.
pub fn update_joystick(scene: &MarkScene, state: &InspectionState, pos: Point) -> Result<InspectionState, InspectError> {
    let Some(session) = state.joystick else {
        return Err(InspectError::InspectionUnavailable);
    };
    let (fx, fy) = joystick_map(pos, session.thumb_range);
    let mut next = state.clone();
    next.lines.retain(|l| l.axis == Axis::X || axis_supported(scene, l.axis));
    set_fraction(&mut next, Axis::X, Some(session.pointer), fx);
    if axis_supported(scene, Axis::Y) {
        set_fraction(&mut next, Axis::Y, Some(session.pointer), fy);
    }
    resolve(scene, next)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TooltipField {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TooltipEntry {
    pub mark_id: MarkId,
    pub row_ids: Vec<RowId>,
    pub series: Option<String>,
    pub fields: Vec<TooltipField>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TooltipPayload {
    pub entries: Vec<TooltipEntry>,
}

impl TooltipPayload {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Field values for each active mark, ordered by legend position of the
/// series and then by smallest row id.
pub fn tooltip_for(scene: &MarkScene, spec: &ChartSpec, data: &Dataset, active: &BTreeSet<MarkId>) -> TooltipPayload {
    let mut entries: Vec<(usize, RowId, TooltipEntry)> = active
        .iter()
        .filter_map(|&id| scene.mark(id))
        .map(|mark| {
            let first = mark.row_ids.iter().copied().min().unwrap_or_default();
            let fields = spec
                .encodings()
                .map(|enc| {
                    let value = if enc.field == spec.encoding.x.field {
                        mark.x_value.key()
                    } else if enc.field == spec.encoding.y.field {
                        Value::Number(mark.y_value).key()
                    } else {
                        data.column(&enc.field)
                            .map(|c| data.value(first, c).key())
                            .unwrap_or_default()
                    };
                    TooltipField {
                        name: enc.field.clone(),
                        value,
                    }
                })
                .collect();
            let legend_rank = mark
                .series
                .as_deref()
                .and_then(|s| scene.legend.iter().position(|e| e.category == s))
                .unwrap_or(0);
            (
                legend_rank,
                first,
                TooltipEntry {
                    mark_id: mark.id,
                    row_ids: mark.row_ids.clone(),
                    series: mark.series.clone(),
                    fields,
                },
            )
        })
        .collect();
    entries.sort_by_key(|(rank, row, _)| (*rank, *row));
    TooltipPayload {
        entries: entries.into_iter().map(|(_, _, e)| e).collect(),
    }
}
