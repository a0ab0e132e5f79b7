//! Random charts and a gesture driver shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use touchvis_core::aggregate::AggOp;
use touchvis_core::chart::{ChartSpec, ChartType, Encoding, Encodings, Margins};
use touchvis_core::config::EngineConfig;
use touchvis_core::data::{Dataset, Field, FieldType, Schema, Value};
use touchvis_core::engine::{Engine, UpdateKind, ViewUpdate};
use touchvis_core::geom::{Point, Rect};
use touchvis_core::gesture::{Millis, RawInputEvent, RawKind};

pub const DAY_MS: i64 = 86_400_000;
pub const EPOCH_2020_MS: i64 = 1_577_836_800_000;

pub fn margins() -> Margins {
    Margins {
        top: 48.0,
        right: 104.0,
        bottom: 56.0,
        left: 56.0,
    }
}

pub fn chart(chart_type: ChartType, x: Encoding, y: Encoding, color: Option<Encoding>) -> ChartSpec {
    ChartSpec {
        chart_type,
        encoding: Encodings { x, y, color },
        width: 280.0,
        height: 360.0,
        margins: margins(),
    }
}

fn q(name: &str) -> Encoding {
    Encoding::new(name, FieldType::Quantitative)
}

fn n(name: &str) -> Encoding {
    Encoding::new(name, FieldType::Nominal)
}

/// Multiples of 0.25 in `[-span/4, span/4)`, so repeats and coincident marks are common.
fn quarter(rng: &mut impl Rng, span: i32) -> f64 {
    rng.gen_range(-span..span) as f64 / 4.0
}

fn categories(rng: &mut impl Rng, prefix: &str, max: usize) -> Vec<String> {
    let k = rng.gen_range(1..=max);
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

/// A valid chart of a random type with `1..=max_rows` rows, plus the fields
/// that make sense to group by.
pub struct RandomChart {
    pub spec: ChartSpec,
    pub data: Dataset,
    pub group_fields: Vec<String>,
}

pub fn random_chart(rng: &mut impl Rng, max_rows: usize) -> RandomChart {
    let rows = rng.gen_range(1..=max_rows);
    match rng.gen_range(0..3) {
        0 => {
            let cats = categories(rng, "c", 4);
            let schema = Schema::new(vec![
                Field::new("x", FieldType::Quantitative),
                Field::new("y", FieldType::Quantitative),
                Field::new("c", FieldType::Nominal),
            ]);
            let data = (0..rows)
                .map(|_| {
                    vec![
                        Value::Number(quarter(rng, 80)),
                        Value::Number(quarter(rng, 80)),
                        Value::Text(cats.choose(rng).unwrap().clone()),
                    ]
                })
                .collect();
            RandomChart {
                spec: chart(ChartType::Scatter, q("x"), q("y"), Some(n("c"))),
                data: Dataset::new(schema, data).unwrap(),
                group_fields: vec!["c".into(), "x".into()],
            }
        }
        1 => {
            let keys = categories(rng, "k", 8);
            let cats = categories(rng, "c", 3);
            let colored = rng.gen_bool(0.5);
            let schema = Schema::new(vec![
                Field::new("k", FieldType::Nominal),
                Field::new("y", FieldType::Quantitative),
                Field::new("c", FieldType::Nominal),
            ]);
            let data = (0..rows)
                .map(|_| {
                    vec![
                        Value::Text(keys.choose(rng).unwrap().clone()),
                        Value::Number(rng.gen_range(0..400) as f64 / 4.0),
                        Value::Text(cats.choose(rng).unwrap().clone()),
                    ]
                })
                .collect();
            RandomChart {
                spec: chart(ChartType::Bar, n("k"), q("y"), colored.then(|| n("c"))),
                data: Dataset::new(schema, data).unwrap(),
                group_fields: vec!["k".into(), "c".into(), "y".into()],
            }
        }
        _ => {
            let series = categories(rng, "s", 4);
            let schema = Schema::new(vec![
                Field::new("t", FieldType::Temporal),
                Field::new("y", FieldType::Quantitative),
                Field::new("s", FieldType::Nominal),
            ]);
            let data = (0..rows)
                .map(|i| {
                    vec![
                        Value::Time(EPOCH_2020_MS + (i / series.len()) as i64 * 30 * DAY_MS),
                        Value::Number(quarter(rng, 200)),
                        Value::Text(series[i % series.len()].clone()),
                    ]
                })
                .collect();
            RandomChart {
                spec: chart(
                    ChartType::Multiline,
                    Encoding::new("t", FieldType::Temporal),
                    q("y"),
                    Some(n("s")),
                ),
                data: Dataset::new(schema, data).unwrap(),
                group_fields: vec!["s".into(), "t".into()],
            }
        }
    }
}

/// Feeds raw events to an engine with a running clock and fails loudly on
/// protocol errors, which would mean the driver itself is broken.
pub struct Driver {
    pub engine: Engine,
    pub t: Millis,
    pub updates: Vec<ViewUpdate>,
    /// Every raw event fed so far.
    pub events: Vec<RawInputEvent>,
}

impl Driver {
    pub fn new(spec: ChartSpec, data: Dataset) -> Self {
        Self {
            engine: Engine::new(spec, data, EngineConfig::default()).expect("chart lays out"),
            t: 0,
            updates: Vec::new(),
            events: Vec::new(),
        }
    }

    pub fn push(&mut self, kind: RawKind) {
        let e = RawInputEvent::new(self.t, kind);
        let out = self.engine.try_process_raw(&e).expect("driver emits well-formed input");
        self.updates.extend(out);
        self.events.push(e);
    }

    pub fn wait(&mut self, ms: Millis) {
        self.t += ms;
    }

    pub fn settle(&mut self) {
        self.wait(400);
        self.push(RawKind::Flush);
        self.wait(100);
    }

    pub fn tap(&mut self, p: Point) {
        self.push(RawKind::TouchDown { pointer_id: 0, x: p.x, y: p.y });
        self.wait(60);
        self.push(RawKind::TouchUp { pointer_id: 0, x: p.x, y: p.y });
        self.settle();
    }

    pub fn double_tap(&mut self, p: Point) {
        for _ in 0..2 {
            self.push(RawKind::TouchDown { pointer_id: 0, x: p.x, y: p.y });
            self.wait(60);
            self.push(RawKind::TouchUp { pointer_id: 0, x: p.x, y: p.y });
            self.wait(100);
        }
        self.settle();
    }

    /// A slow drag (20 dip per 40 ms) through `points`, never a swipe.
    pub fn drag(&mut self, points: &[Point]) {
        let Some((&first, rest)) = points.split_first() else { return };
        self.push(RawKind::TouchDown { pointer_id: 0, x: first.x, y: first.y });
        let mut at = first;
        for &target in rest {
            let steps = (at.distance(target) / 20.0).ceil().max(1.0) as usize;
            for k in 1..=steps {
                let f = k as f64 / steps as f64;
                self.wait(40);
                let p = Point::new(at.x + (target.x - at.x) * f, at.y + (target.y - at.y) * f);
                self.push(RawKind::TouchMove { pointer_id: 0, x: p.x, y: p.y });
            }
            at = target;
        }
        self.wait(40);
        self.push(RawKind::TouchUp { pointer_id: 0, x: at.x, y: at.y });
        self.settle();
    }

    pub fn lasso(&mut self, r: Rect) {
        self.drag(&[
            Point::new(r.x0, r.y0),
            Point::new(r.x1, r.y0),
            Point::new(r.x1, r.y1),
            Point::new(r.x0, r.y1),
            Point::new(r.x0, r.y0 + 2.0),
        ]);
    }

    pub fn swipe(&mut self, from: Point) {
        self.push(RawKind::TouchDown { pointer_id: 0, x: from.x, y: from.y });
        for k in 1..=4 {
            self.wait(20);
            self.push(RawKind::TouchMove { pointer_id: 0, x: from.x + 40.0 * k as f64, y: from.y });
        }
        self.push(RawKind::TouchUp { pointer_id: 0, x: from.x + 160.0, y: from.y });
        self.settle();
    }

    pub fn menu(&mut self, command: &str) {
        self.push(RawKind::MenuCommand { command: command.into() });
        self.wait(200);
    }

    pub fn shake(&mut self) {
        for _ in 0..5 {
            self.push(RawKind::MotionSample { ax: 0.0, ay: 0.0, az: 9.81 });
            self.wait(50);
        }
        for ax in [30.0, -30.0, 30.0, -30.0] {
            self.push(RawKind::MotionSample { ax, ay: 0.0, az: 9.81 });
            self.wait(60);
        }
        // Outlast the debounce so the next shake counts.
        self.wait(1100);
    }

    /// Two fingers sweep the x and y axis bands.
    pub fn two_finger_inspect(&mut self, rng: &mut impl Rng) {
        let s = self.engine.scene();
        let (plot, bx, by) = (s.plot, s.axis_x.center().y, s.axis_y.center().x);
        let (fx, fy) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        self.push(RawKind::TouchDown { pointer_id: 0, x: plot.x0, y: bx });
        self.push(RawKind::TouchDown { pointer_id: 1, x: by, y: plot.y1 });
        for k in 1..=5 {
            let f = k as f64 / 5.0;
            self.wait(60);
            self.push(RawKind::TouchMove { pointer_id: 0, x: plot.x0 + f * fx * plot.width(), y: bx });
            self.push(RawKind::TouchMove { pointer_id: 1, x: by, y: plot.y1 - f * fy * plot.height() });
        }
        self.wait(60);
        self.push(RawKind::TouchUp { pointer_id: 0, x: plot.x0 + fx * plot.width(), y: bx });
        self.push(RawKind::TouchUp { pointer_id: 1, x: by, y: plot.y1 - fy * plot.height() });
        self.settle();
    }

    pub fn errors(&self) -> Vec<String> {
        self.updates
            .iter()
            .filter_map(|u| match &u.kind {
                UpdateKind::Error { code, message } => Some(format!("{code}: {message}")),
                _ => None,
            })
            .collect()
    }
}

fn random_point_in(rng: &mut impl Rng, r: Rect) -> Point {
    Point::new(rng.gen_range(r.x0..=r.x1), rng.gen_range(r.y0..=r.y1))
}

/// Performs one random user action. Each action is a complete gesture that
/// commits at most one view change.
pub fn random_action(d: &mut Driver, rng: &mut impl Rng, group_fields: &[String]) -> &'static str {
    let scene = d.engine.scene().clone();
    let plot = scene.plot;
    match rng.gen_range(0..14) {
        0 | 1 => {
            let Some(m) = scene.marks.choose(rng) else { return "noop" };
            d.tap(m.center);
            "tapMark"
        }
        2 => {
            let Some(e) = scene.legend.choose(rng) else { return "noop" };
            d.tap(e.bounds.center());
            "tapLegend"
        }
        3 | 4 => {
            let a = random_point_in(rng, plot);
            let b = random_point_in(rng, plot);
            let r = Rect::new(a.x, a.y, b.x, b.y);
            if r.width() < 30.0 || r.height() < 30.0 {
                d.lasso(Rect::new(plot.x0 + 2.0, plot.y0 + 2.0, plot.x1 - 2.0, plot.y1 - 2.0));
            } else {
                d.lasso(r);
            }
            "lasso"
        }
        5 => {
            d.double_tap(plot.center());
            "focus"
        }
        6 => {
            d.swipe(Point::new(plot.x0 + 10.0, plot.center().y));
            "remove"
        }
        7 => {
            d.menu("aggregate.merge");
            "aggregateMerge"
        }
        8 => {
            let f = group_fields.choose(rng).unwrap();
            d.menu(&format!("aggregate.by:{f}"));
            "aggregateBy"
        }
        9 => {
            let op = AggOp::ALL.choose(rng).unwrap();
            d.menu(&format!("aggregate.op:{}", op.as_str()));
            "aggregateOp"
        }
        10 => {
            d.shake();
            "reset"
        }
        11 => {
            let y = scene.axis_x.center().y;
            let to = rng.gen_range(plot.x0 + 15.0..=plot.x1);
            d.drag(&[Point::new(plot.x0, y), Point::new(to, y)]);
            d.tap(Point::new(to, y + 6.0));
            "axisTap"
        }
        12 => {
            d.two_finger_inspect(rng);
            "inspect"
        }
        _ => {
            // Top-right plot corner, usually background.
            d.tap(Point::new(plot.x1 - 1.0, plot.y0 + 1.0));
            "background"
        }
    }
}
