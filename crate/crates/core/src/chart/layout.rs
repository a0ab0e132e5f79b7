use std::collections::BTreeMap;

use serde::Serialize;

use super::scale::{band_categories, padded_extent, Domain, Scale, ScaleKind};
use super::spec::{ChartSpec, ChartType};
use super::ChartError;
use crate::data::{Dataset, FieldType, RowId, Value};
use crate::geom::{Point, Rect};
use crate::view::ViewState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutParams {
    /// Depth of the axis hit bands, measured outward from each axis line.
    pub axis_band_dip: f64,
    pub point_radius_dip: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        Self {
            axis_band_dip: 48.0,
            point_radius_dip: 4.0,
        }
    }
}

const LEGEND_ROW_DIP: f64 = 24.0;
const LEGEND_ENTRY_DIP: f64 = 20.0;
const LEGEND_INSET_DIP: f64 = 8.0;
const BAR_FILL: f64 = 0.8;

pub type MarkId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum MarkShape {
    Point,
    Rect,
    LineVertex,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Mark {
    pub id: MarkId,
    pub row_ids: Vec<RowId>,
    pub shape: MarkShape,
    pub center: Point,
    pub bounds: Rect,
    pub series: Option<String>,
    /// Data value along x (the band's value for bars).
    pub x_value: Value,
    /// Data value along y (the aggregated sum for bars).
    pub y_value: f64,
    pub clipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LegendEntry {
    pub category: String,
    pub bounds: Rect,
    /// Set when no visible row carries this category.
    pub filtered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SeriesLine {
    pub series: String,
    /// Vertices ordered by x.
    pub mark_ids: Vec<MarkId>,
}

/// Laid-out marks, axes and legend; the hit-testing substrate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MarkScene {
    pub chart_type: ChartType,
    pub plot: Rect,
    pub viewport: Rect,
    pub x_scale: Scale,
    pub y_scale: Scale,
    /// Sorted by id.
    pub marks: Vec<Mark>,
    pub axis_x: Rect,
    pub axis_y: Rect,
    pub legend: Vec<LegendEntry>,
    pub lines: Vec<SeriesLine>,
}

impl MarkScene {
    pub fn mark(&self, id: MarkId) -> Option<&Mark> {
        self.marks
            .binary_search_by_key(&id, |m| m.id)
            .ok()
            .map(|i| &self.marks[i])
    }

    pub fn legend_entry(&self, category: &str) -> Option<&LegendEntry> {
        self.legend.iter().find(|e| e.category == category)
    }
}

fn column(data: &Dataset, field: &str) -> Result<usize, ChartError> {
    data.column(field)
        .ok_or_else(|| ChartError::Spec(format!("unknown field `{field}`")))
}

fn numeric(v: &Value) -> Result<f64, ChartError> {
    v.as_f64()
        .ok_or_else(|| ChartError::Spec(format!("expected a numeric value, got {v}")))
}

/// Per-band y sums in band (first-appearance) order.
fn bar_sums(data: &Dataset, xc: usize, yc: usize, rows: &[RowId]) -> Result<BTreeMap<String, f64>, ChartError> {
    let mut sums = BTreeMap::new();
    for &r in rows {
        *sums.entry(data.value(r, xc).key()).or_insert(0.0) += numeric(data.value(r, yc))?;
    }
    Ok(sums)
}

/// Automatic (unpadded-by-override) domains over `rows`: padded numeric extents,
/// band categories in first-appearance order, and for bars a y extent covering
/// zero and every band's sum.
pub fn auto_domains(spec: &ChartSpec, data: &Dataset, rows: &[RowId]) -> Result<(Domain, Domain), ChartError> {
    if rows.is_empty() {
        return Err(ChartError::EmptyDomain);
    }
    let xc = column(data, &spec.encoding.x.field)?;
    let yc = column(data, &spec.encoding.y.field)?;
    let x_band = spec.chart_type == ChartType::Bar || spec.encoding.x.field_type == FieldType::Nominal;
    let x = if x_band {
        Domain::Band {
            categories: band_categories(rows.iter().map(|&r| data.value(r, xc))),
        }
    } else {
        let vals = rows
            .iter()
            .map(|&r| numeric(data.value(r, xc)))
            .collect::<Result<Vec<_>, _>>()?;
        let (min, max) = padded_extent(vals).ok_or(ChartError::EmptyDomain)?;
        Domain::Numeric { min, max }
    };
    let y_vals: Vec<f64> = if spec.chart_type == ChartType::Bar {
        std::iter::once(0.0)
            .chain(bar_sums(data, xc, yc, rows)?.into_values())
            .collect()
    } else {
        rows.iter()
            .map(|&r| numeric(data.value(r, yc)))
            .collect::<Result<_, _>>()?
    };
    let (min, max) = padded_extent(y_vals).ok_or(ChartError::EmptyDomain)?;
    Ok((x, Domain::Numeric { min, max }))
}

fn x_scale_kind(spec: &ChartSpec) -> ScaleKind {
    if spec.chart_type == ChartType::Bar {
        ScaleKind::Band
    } else {
        ScaleKind::for_field(spec.encoding.x.field_type)
    }
}

/// Lays out the visible rows of `data` under `view`.
pub fn layout(spec: &ChartSpec, data: &Dataset, view: &ViewState, params: &LayoutParams) -> Result<MarkScene, ChartError> {
    spec.validate(params.axis_band_dip)?;
    spec.validate_against(data.schema())?;
    if let Some(bad) = view.visible.iter().find(|&&r| r as usize >= data.len()) {
        return Err(ChartError::Spec(format!("visible row {bad} out of range")));
    }
    let xc = column(data, &spec.encoding.x.field)?;
    let yc = column(data, &spec.encoding.y.field)?;
    let cc = match &spec.encoding.color {
        Some(c) => Some(column(data, &c.field)?),
        None => None,
    };

    let all: Vec<RowId> = data.row_ids().collect();
    let (auto_x, auto_y) = auto_domains(spec, data, &all)?;
    let (w, h) = (spec.width, spec.height);
    let x_scale = Scale::new(
        x_scale_kind(spec),
        view.overrides.x.clone().unwrap_or(auto_x),
        (0.0, w),
    )?;
    let y_scale = Scale::new(
        ScaleKind::for_field(spec.encoding.y.field_type),
        view.overrides.y.clone().unwrap_or(auto_y),
        (h, 0.0),
    )?;

    let plot = Rect::new(0.0, 0.0, w, h);
    let m = spec.margins;
    let viewport = Rect::new(-m.left, -m.top, w + m.right, h + m.bottom);
    let series_of = |r: RowId| cc.map(|c| data.value(r, c).key());
    let clipped = |p: Point| !(p.x >= -1e-9 && p.x <= w + 1e-9 && p.y >= -1e-9 && p.y <= h + 1e-9);
    let visible: Vec<RowId> = view.visible.iter().copied().collect();

    let mut marks = Vec::new();
    let mut lines = Vec::new();
    match spec.chart_type {
        ChartType::Scatter | ChartType::Multiline => {
            let (shape, radius) = if spec.chart_type == ChartType::Scatter {
                (MarkShape::Point, params.point_radius_dip)
            } else {
                (MarkShape::LineVertex, params.point_radius_dip * 0.75)
            };
            for &r in &visible {
                let xv = data.value(r, xc);
                let yv = numeric(data.value(r, yc))?;
                let center = Point::new(
                    x_scale
                        .position(xv)
                        .ok_or_else(|| ChartError::Spec(format!("value {xv} outside x domain")))?,
                    y_scale.apply(yv).unwrap_or(f64::NAN),
                );
                marks.push(Mark {
                    id: r,
                    row_ids: vec![r],
                    shape,
                    center,
                    bounds: Rect::around(center, radius, radius),
                    series: series_of(r),
                    x_value: xv.clone(),
                    y_value: yv,
                    clipped: clipped(center),
                });
            }
            if spec.chart_type == ChartType::Multiline {
                let mut by_series: BTreeMap<String, Vec<&Mark>> = BTreeMap::new();
                for mark in &marks {
                    by_series
                        .entry(mark.series.clone().unwrap_or_default())
                        .or_default()
                        .push(mark);
                }
                let legend_order = band_categories(all.iter().map(|&r| data.value(r, cc.unwrap_or(xc))));
                for series in legend_order {
                    if let Some(mut members) = by_series.remove(&series) {
                        members.sort_by(|a, b| a.center.x.total_cmp(&b.center.x).then(a.id.cmp(&b.id)));
                        lines.push(SeriesLine {
                            series,
                            mark_ids: members.iter().map(|m| m.id).collect(),
                        });
                    }
                }
            }
        }
        ChartType::Bar => {
            let Domain::Band { categories } = &x_scale.domain else {
                return Err(ChartError::Spec("bar x scale must be a band scale".into()));
            };
            let mut members: BTreeMap<usize, Vec<RowId>> = BTreeMap::new();
            for &r in &visible {
                let key = data.value(r, xc).key();
                let band = categories
                    .iter()
                    .position(|c| *c == key)
                    .ok_or_else(|| ChartError::Spec(format!("category `{key}` outside x domain")))?;
                members.entry(band).or_default().push(r);
            }
            let band_w = x_scale.band_width().unwrap_or(0.0);
            let base = y_scale.apply(0.0).unwrap_or(h);
            for (band, rows) in members {
                let sum = rows
                    .iter()
                    .map(|&r| numeric(data.value(r, yc)))
                    .sum::<Result<f64, _>>()?;
                let x0 = band_w * band as f64 + band_w * (1.0 - BAR_FILL) / 2.0;
                let top = y_scale.apply(sum).unwrap_or(base);
                let bounds = Rect::new(x0, top, x0 + band_w * BAR_FILL, base);
                let center = bounds.center();
                marks.push(Mark {
                    id: band as MarkId,
                    series: series_of(rows[0]),
                    x_value: data.value(rows[0], xc).clone(),
                    row_ids: rows,
                    shape: MarkShape::Rect,
                    center,
                    bounds,
                    y_value: sum,
                    clipped: clipped(center),
                });
            }
        }
    }
    marks.sort_by_key(|m| m.id);

    let legend = match cc {
        None => Vec::new(),
        Some(c) => band_categories(all.iter().map(|&r| data.value(r, c)))
            .into_iter()
            .enumerate()
            .map(|(i, category)| {
                let top = i as f64 * LEGEND_ROW_DIP;
                let filtered = !visible.iter().any(|&r| data.value(r, c).key() == category);
                LegendEntry {
                    category,
                    bounds: Rect::new(w + LEGEND_INSET_DIP, top, w + m.right - LEGEND_INSET_DIP, top + LEGEND_ENTRY_DIP),
                    filtered,
                }
            })
            .collect(),
    };

    let band = params.axis_band_dip;
    Ok(MarkScene {
        chart_type: spec.chart_type,
        plot,
        viewport,
        x_scale,
        y_scale,
        marks,
        axis_x: Rect::new(0.0, h, w, h + band),
        axis_y: Rect::new(-band, 0.0, 0.0, h),
        legend,
        lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::spec::{Encoding, Encodings, Margins};
    use crate::data::{Field, Schema};
    use std::collections::BTreeSet;

    fn spec(chart_type: ChartType, x: FieldType, color: bool) -> ChartSpec {
        ChartSpec {
            chart_type,
            encoding: Encodings {
                x: Encoding::new("x", x),
                y: Encoding::new("y", FieldType::Quantitative),
                color: color.then(|| Encoding::new("c", FieldType::Nominal)),
            },
            width: 300.0,
            height: 200.0,
            margins: Margins::uniform(60.0),
        }
    }

    fn data(x_type: FieldType, rows: &[(Value, f64, &str)]) -> Dataset {
        let schema = Schema::new(vec![
            Field::new("x", x_type),
            Field::new("y", FieldType::Quantitative),
            Field::new("c", FieldType::Nominal),
        ]);
        Dataset::new(
            schema,
            rows.iter()
                .map(|(x, y, c)| vec![x.clone(), Value::Number(*y), Value::Text(c.to_string())])
                .collect(),
        )
        .unwrap()
    }

    fn n(v: f64) -> Value {
        Value::Number(v)
    }

    fn t(s: &str) -> Value {
        Value::Text(s.into())
    }

    #[test]
    fn scatter_one_point_per_row() {
        let d = data(FieldType::Quantitative, &[(n(1.0), 2.0, "a"), (n(3.0), 4.0, "b"), (n(2.0), 1.0, "a")]);
        let s = spec(ChartType::Scatter, FieldType::Quantitative, true);
        let scene = layout(&s, &d, &ViewState::all_visible(3), &LayoutParams::default()).unwrap();
        assert_eq!(scene.marks.len(), 3);
        for m in &scene.marks {
            assert_eq!(m.row_ids, vec![m.id]);
            assert!(!m.clipped);
        }
        assert_eq!(scene.legend.len(), 2);
        assert_eq!(scene.axis_y, Rect::new(-48.0, 0.0, 0.0, 200.0));
    }

    #[test]
    fn bar_one_rect_per_band() {
        let d = data(
            FieldType::Nominal,
            &[(t("CA"), 5.0, "w"), (t("TX"), 3.0, "s"), (t("CA"), 2.0, "w"), (t("NY"), 1.0, "e")],
        );
        let s = spec(ChartType::Bar, FieldType::Nominal, false);
        let scene = layout(&s, &d, &ViewState::all_visible(4), &LayoutParams::default()).unwrap();
        assert_eq!(scene.marks.len(), 3);
        assert_eq!(scene.marks[0].row_ids, vec![0, 2]);
        assert_eq!(scene.marks[0].y_value, 7.0);
        assert_eq!(scene.marks[0].shape, MarkShape::Rect);
        // Bars grow up from the zero baseline.
        assert!(scene.marks[0].bounds.y0 < scene.marks[1].bounds.y0);
    }

    #[test]
    fn multiline_filtered_series_keeps_legend_entry() {
        let rows: Vec<(Value, f64, &str)> = (0..4)
            .flat_map(|i| {
                ["a", "b", "c"]
                    .into_iter()
                    .map(move |s| (Value::Time(i * 86_400_000), i as f64, s))
            })
            .collect();
        let d = data(FieldType::Temporal, &rows);
        let s = spec(ChartType::Multiline, FieldType::Temporal, true);
        let mut view = ViewState::all_visible(d.len());
        // Filter out series "b" entirely.
        view.visible = d
            .row_ids()
            .filter(|&r| d.value(r, 2).key() != "b")
            .collect::<BTreeSet<_>>();
        let scene = layout(&s, &d, &view, &LayoutParams::default()).unwrap();
        // Oracle: recount groups from the filtered rows directly.
        let expected_series: BTreeSet<String> = view.visible.iter().map(|&r| d.value(r, 2).key()).collect();
        let scene_series: BTreeSet<String> = scene.marks.iter().filter_map(|m| m.series.clone()).collect();
        assert_eq!(scene_series, expected_series);
        assert_eq!(scene.lines.len(), 2);
        let b = scene.legend_entry("b").unwrap();
        assert!(b.filtered);
        assert!(!scene.legend_entry("a").unwrap().filtered);
        for line in &scene.lines {
            let xs: Vec<f64> = line.mark_ids.iter().map(|&id| scene.mark(id).unwrap().center.x).collect();
            assert!(xs.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn layout_partitions_visible_rows() {
        let d = data(
            FieldType::Nominal,
            &[(t("a"), 1.0, "x"), (t("b"), 1.0, "x"), (t("a"), 1.0, "x"), (t("c"), 1.0, "x")],
        );
        let s = spec(ChartType::Bar, FieldType::Nominal, false);
        let mut view = ViewState::all_visible(4);
        view.visible.remove(&1);
        let scene = layout(&s, &d, &view, &LayoutParams::default()).unwrap();
        let mut covered: Vec<RowId> = scene.marks.iter().flat_map(|m| m.row_ids.clone()).collect();
        covered.sort();
        assert_eq!(covered, vec![0, 2, 3]);
        // Band domain is unchanged by filtering, so "b" keeps its (empty) slot.
        assert_eq!(scene.x_scale.band_width(), Some(100.0));
    }

    #[test]
    fn encoding_mismatch_is_spec_error() {
        let d = data(FieldType::Nominal, &[(t("a"), 1.0, "x")]);
        let s = spec(ChartType::Scatter, FieldType::Quantitative, false);
        assert!(matches!(
            layout(&s, &d, &ViewState::all_visible(1), &LayoutParams::default()),
            Err(ChartError::Spec(_))
        ));
    }
}
