use serde::Serialize;

use super::layout::{MarkId, MarkScene};
use crate::geom::Point;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "target", rename_all = "camelCase")]
pub enum HitTarget {
    Mark { id: MarkId },
    Legend { category: String },
    AxisX,
    AxisY,
    Background,
}

/// Resolves what lies under `pos`.
///
/// A mark is hit when its bounds contain `pos` or its center is within
/// `tolerance` dip; among hit marks the nearest wins (contained marks count as
/// distance zero) and ties go to the smallest id. Marks take priority over
/// legend entries, which take priority over the axis bands.
pub fn hit_test(scene: &MarkScene, pos: Point, tolerance: f64) -> HitTarget {
    let tolerance = tolerance.max(0.0);
    let best = scene
        .marks
        .iter()
        .filter_map(|m| {
            let d = if m.bounds.contains(pos) {
                0.0
            } else {
                m.center.distance(pos)
            };
            (d <= tolerance).then_some((d, m.id))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    if let Some((_, id)) = best {
        return HitTarget::Mark { id };
    }
    if let Some(entry) = scene.legend.iter().find(|e| e.bounds.contains(pos)) {
        return HitTarget::Legend {
            category: entry.category.clone(),
        };
    }
    if scene.axis_x.contains(pos) {
        HitTarget::AxisX
    } else if scene.axis_y.contains(pos) {
        HitTarget::AxisY
    } else {
        HitTarget::Background
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::layout::{LegendEntry, Mark, MarkShape};
    use crate::chart::scale::{Domain, Scale, ScaleKind};
    use crate::chart::ChartType;
    use crate::data::Value;
    use crate::geom::Rect;

    fn mark(id: MarkId, x: f64, y: f64) -> Mark {
        let center = Point::new(x, y);
        Mark {
            id,
            row_ids: vec![id],
            shape: MarkShape::Point,
            center,
            bounds: Rect::around(center, 4.0, 4.0),
            series: None,
            x_value: Value::Number(x),
            y_value: y,
            clipped: false,
        }
    }

    fn scene(marks: Vec<Mark>) -> MarkScene {
        let scale = Scale::new(ScaleKind::Linear, Domain::Numeric { min: 0.0, max: 1.0 }, (0.0, 300.0)).unwrap();
        MarkScene {
            chart_type: ChartType::Scatter,
            plot: Rect::new(0.0, 0.0, 300.0, 300.0),
            viewport: Rect::new(-60.0, -60.0, 400.0, 360.0),
            x_scale: scale.clone(),
            y_scale: scale,
            marks,
            axis_x: Rect::new(0.0, 300.0, 300.0, 348.0),
            axis_y: Rect::new(-48.0, 0.0, 0.0, 300.0),
            legend: vec![LegendEntry {
                category: "setosa".into(),
                bounds: Rect::new(308.0, 0.0, 392.0, 20.0),
                filtered: false,
            }],
            lines: vec![],
        }
    }

    #[test]
    fn fat_finger_tolerance() {
        let s = scene(vec![mark(0, 50.0, 50.0)]);
        assert_eq!(hit_test(&s, Point::new(60.0, 58.0), 24.0), HitTarget::Mark { id: 0 });
        assert_eq!(hit_test(&s, Point::new(60.0, 58.0), 12.0), HitTarget::Background);
    }

    #[test]
    fn equidistant_tie_goes_to_smaller_id() {
        let s = scene(vec![mark(3, 90.0, 100.0), mark(7, 110.0, 100.0)]);
        assert_eq!(hit_test(&s, Point::new(100.0, 100.0), 24.0), HitTarget::Mark { id: 3 });
    }

    #[test]
    fn bands_legend_background() {
        let s = scene(vec![mark(0, 150.0, 150.0)]);
        assert_eq!(hit_test(&s, Point::new(-30.0, 200.0), 24.0), HitTarget::AxisY);
        assert_eq!(hit_test(&s, Point::new(100.0, 320.0), 24.0), HitTarget::AxisX);
        assert_eq!(
            hit_test(&s, Point::new(320.0, 10.0), 24.0),
            HitTarget::Legend { category: "setosa".into() }
        );
        assert_eq!(hit_test(&s, Point::new(250.0, 20.0), 24.0), HitTarget::Background);
    }

    #[test]
    fn mark_beats_axis_band() {
        let s = scene(vec![mark(0, 10.0, 290.0)]);
        assert_eq!(hit_test(&s, Point::new(10.0, 305.0), 24.0), HitTarget::Mark { id: 0 });
    }
}
