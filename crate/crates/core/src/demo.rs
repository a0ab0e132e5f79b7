//! Bundled demo charts and sample input traces, one per interaction.

use std::str::FromStr;

use crate::chart::{ChartSpec, ChartType, MarkScene, SpecDocument};
use crate::config::EngineConfig;
use crate::data::{parse_csv, Dataset};
use crate::engine::{Engine, Interaction};
use crate::geom::{Point, Rect};
use crate::gesture::{Millis, PointerId, RawInputEvent, RawKind};
use crate::trace::{InputTrace, TraceHeader};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoChart {
    Iris,
    Population,
    Unemployment,
}

impl DemoChart {
    pub const ALL: [DemoChart; 3] = [DemoChart::Iris, DemoChart::Population, DemoChart::Unemployment];

    pub fn name(self) -> &'static str {
        match self {
            DemoChart::Iris => "iris",
            DemoChart::Population => "population",
            DemoChart::Unemployment => "unemployment",
        }
    }

    pub fn spec_file_name(self) -> String {
        format!("{}.spec.json", self.name())
    }

    pub fn data_file_name(self) -> String {
        format!("{}.csv", self.name())
    }

    pub fn spec_text(self) -> &'static str {
        match self {
            DemoChart::Iris => include_str!("../fixtures/iris.spec.json"),
            DemoChart::Population => include_str!("../fixtures/population.spec.json"),
            DemoChart::Unemployment => include_str!("../fixtures/unemployment.spec.json"),
        }
    }

    pub fn data_text(self) -> &'static str {
        match self {
            DemoChart::Iris => include_str!("../fixtures/iris.csv"),
            DemoChart::Population => include_str!("../fixtures/population.csv"),
            DemoChart::Unemployment => include_str!("../fixtures/unemployment.csv"),
        }
    }

    /// Field used by the group-by sample trace.
    fn alternate_group(self) -> &'static str {
        match self {
            DemoChart::Iris => "species",
            DemoChart::Population => "region",
            DemoChart::Unemployment => "series",
        }
    }

    /// Parses the bundled spec and data. The fixtures are compiled in, so a
    /// failure here is a packaging bug.
    pub fn load(self) -> (ChartSpec, Dataset) {
        let doc = SpecDocument::parse(self.spec_text()).expect("bundled spec parses");
        let data = parse_csv(self.data_text(), &doc.schema()).expect("bundled data parses");
        (doc.chart, data)
    }

    /// One sample trace per interaction, generated against the initial layout.
    pub fn traces(self) -> Vec<DemoTrace> {
        let (spec, data) = self.load();
        let engine = Engine::new(spec, data, EngineConfig::default()).expect("bundled chart lays out");
        let s = engine.scene();
        let header = TraceHeader {
            spec: Some(self.spec_file_name()),
            data: Some(self.data_file_name()),
            ..TraceHeader::default()
        };
        Interaction::ALL
            .iter()
            .enumerate()
            .map(|(i, &interaction)| {
                let mut b = TraceBuilder::default();
                script(self, s, interaction, &mut b);
                DemoTrace {
                    name: format!("{:02}-{}", i + 1, interaction.as_str()),
                    interaction,
                    trace: InputTrace::new(header.clone(), b.events),
                }
            })
            .collect()
    }
}

impl FromStr for DemoChart {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DemoChart::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown demo chart `{s}` (expected iris, population or unemployment)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoTrace {
    pub name: String,
    pub interaction: Interaction,
    pub trace: InputTrace,
}

/// Emits timestamped raw events with a running clock.
#[derive(Debug, Default)]
struct TraceBuilder {
    t: Millis,
    events: Vec<RawInputEvent>,
}

impl TraceBuilder {
    /// Records `kind` at the current time, with coordinates rounded to 0.01 dip.
    fn push(&mut self, kind: RawKind) {
        let r = |v: f64| (v * 100.0).round() / 100.0;
        let kind = match kind {
            RawKind::TouchDown { pointer_id, x, y } => RawKind::TouchDown { pointer_id, x: r(x), y: r(y) },
            RawKind::TouchMove { pointer_id, x, y } => RawKind::TouchMove { pointer_id, x: r(x), y: r(y) },
            RawKind::TouchUp { pointer_id, x, y } => RawKind::TouchUp { pointer_id, x: r(x), y: r(y) },
            other => other,
        };
        self.events.push(RawInputEvent::new(self.t, kind));
    }

    fn wait(&mut self, ms: Millis) {
        self.t += ms;
    }

    fn tap(&mut self, p: Point) {
        self.push(RawKind::TouchDown { pointer_id: 0, x: p.x, y: p.y });
        self.wait(60);
        self.push(RawKind::TouchUp { pointer_id: 0, x: p.x, y: p.y });
        self.settle();
    }

    fn double_tap(&mut self, p: Point) {
        for gap in [120, 60] {
            self.push(RawKind::TouchDown { pointer_id: 0, x: p.x, y: p.y });
            self.wait(60);
            self.push(RawKind::TouchUp { pointer_id: 0, x: p.x, y: p.y });
            self.wait(gap);
        }
        self.settle();
    }

    /// Lets any pending tap resolve.
    fn settle(&mut self) {
        self.wait(400);
        self.push(RawKind::Flush);
        self.wait(100);
    }

    fn down(&mut self, id: PointerId, p: Point) {
        self.push(RawKind::TouchDown { pointer_id: id, x: p.x, y: p.y });
    }

    fn moved(&mut self, id: PointerId, p: Point) {
        self.push(RawKind::TouchMove { pointer_id: id, x: p.x, y: p.y });
    }

    fn up(&mut self, id: PointerId, p: Point) {
        self.push(RawKind::TouchUp { pointer_id: id, x: p.x, y: p.y });
    }

    /// A slow single-finger drag through `points`, 10 dip every 50 ms.
    fn drag(&mut self, points: &[Point]) {
        let Some((&first, rest)) = points.split_first() else { return };
        self.down(0, first);
        let mut at = first;
        for &target in rest {
            let steps = (at.distance(target) / 10.0).ceil().max(1.0) as usize;
            for k in 1..=steps {
                let f = k as f64 / steps as f64;
                self.wait(50);
                self.moved(0, Point::new(at.x + (target.x - at.x) * f, at.y + (target.y - at.y) * f));
            }
            at = target;
        }
        self.wait(50);
        self.up(0, at);
        self.settle();
    }

    fn lasso(&mut self, r: Rect) {
        self.drag(&[
            Point::new(r.x0, r.y0),
            Point::new(r.x1, r.y0),
            Point::new(r.x1, r.y1),
            Point::new(r.x0, r.y1),
            Point::new(r.x0, r.y0 + 5.0),
        ]);
    }

    /// A quick horizontal flick: 160 dip in 80 ms.
    fn swipe(&mut self, from: Point) {
        self.down(0, from);
        for k in 1..=4 {
            self.wait(20);
            self.moved(0, Point::new(from.x + 40.0 * k as f64, from.y));
        }
        self.up(0, Point::new(from.x + 160.0, from.y));
        self.settle();
    }

    fn menu(&mut self, command: &str) {
        self.push(RawKind::MenuCommand { command: command.into() });
        self.wait(200);
    }

    /// The device at rest, then a vigorous shake along x.
    fn shake(&mut self) {
        for _ in 0..5 {
            self.push(RawKind::MotionSample { ax: 0.0, ay: 0.0, az: 9.81 });
            self.wait(50);
        }
        for ax in [30.0, -30.0, 30.0, -30.0] {
            self.push(RawKind::MotionSample { ax, ay: 0.0, az: 9.81 });
            self.wait(60);
        }
        self.wait(200);
    }
}

fn inset(r: Rect, fx: f64, fy: f64) -> Rect {
    let (dx, dy) = (r.width() * fx, r.height() * fy);
    Rect::new(r.x0 + dx, r.y0 + dy, r.x1 - dx, r.y1 - dy)
}

fn script(chart: DemoChart, s: &MarkScene, interaction: Interaction, b: &mut TraceBuilder) {
    let plot = s.plot;
    let (w, h) = (plot.width(), plot.height());
    let x_band_y = s.axis_x.center().y;
    let y_band_x = s.axis_y.center().x;
    let legend = s.legend.first().map_or(plot.center(), |e| e.bounds.center());
    let middle = s.marks[s.marks.len() / 2].center;
    let everything = inset(plot, 0.005, 0.005);
    match interaction {
        Interaction::TwoFingerInspect => {
            let bar = s.chart_type == ChartType::Bar;
            b.down(0, Point::new(0.1 * w, x_band_y));
            if !bar {
                b.down(1, Point::new(y_band_x, 0.9 * h));
            }
            for k in 1..=12 {
                b.wait(50);
                b.moved(0, Point::new((0.1 + 0.05 * k as f64) * w, x_band_y));
                if !bar {
                    b.moved(1, Point::new(y_band_x, (0.9 - 0.05 * k as f64) * h));
                }
            }
            b.wait(50);
            b.up(0, Point::new(0.7 * w, x_band_y));
            if !bar {
                b.up(1, Point::new(y_band_x, 0.3 * h));
            }
            b.settle();
        }
        Interaction::SingleFingerInspect => {
            b.push(RawKind::JoystickToggle);
            b.wait(200);
            b.drag(&[
                plot.center(),
                Point::new(plot.center().x + 0.15 * w, plot.center().y),
                Point::new(plot.center().x + 0.15 * w, plot.center().y - 0.15 * h),
            ]);
            b.push(RawKind::JoystickToggle);
            b.wait(200);
        }
        Interaction::LassoSelect => b.lasso(inset(plot, 0.25, 0.2)),
        Interaction::TapSelect => {
            b.tap(middle);
            b.tap(legend);
        }
        Interaction::AxisTapSelect => {
            b.drag(&[Point::new(0.1 * w, x_band_y), Point::new(0.55 * w, x_band_y)]);
            b.tap(Point::new(0.55 * w, x_band_y + 8.0));
        }
        Interaction::Focus => {
            b.tap(legend);
            b.double_tap(plot.center());
        }
        Interaction::Remove => {
            b.tap(legend);
            b.swipe(Point::new(0.1 * w, 0.5 * h));
        }
        Interaction::AggregateMerge => {
            b.lasso(everything);
            b.menu("aggregate.merge");
        }
        Interaction::AggregateBy => {
            b.lasso(everything);
            b.menu(&format!("aggregate.by:{}", chart.alternate_group()));
        }
        Interaction::AggregateOp => {
            b.lasso(everything);
            b.menu("aggregate.merge");
            b.menu("aggregate.op:max");
        }
        Interaction::Reset => {
            b.tap(legend);
            b.double_tap(plot.center());
            b.shake();
        }
        Interaction::Undo => {
            b.tap(legend);
            b.menu("history.undo");
        }
        Interaction::Redo => {
            b.tap(legend);
            b.menu("history.undo");
            b.menu("history.redo");
        }
    }
}
