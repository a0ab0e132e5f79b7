//! Deterministic recognizer turning timestamped touch and motion input into
//! taps, double taps, drags, swipes and shakes.
//!
//! Time only advances through event timestamps, so replaying the same stream
//! always yields the same gestures.

mod motion;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;

pub use motion::ShakeDetector;

pub type Millis = i64;
pub type PointerId = u32;

/// Concurrent touches beyond this count are consumed without producing gestures.
pub const MAX_POINTERS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GestureConfig {
    pub tap_max_ms: Millis,
    pub tap_slop_dip: f64,
    pub double_tap_gap_ms: Millis,
    pub double_tap_radius_dip: f64,
    pub swipe_min_velocity_dip_per_s: f64,
    pub swipe_max_duration_ms: Millis,
    pub swipe_min_distance_dip: f64,
    pub shake_threshold_mps2: f64,
    pub shake_min_samples: usize,
    pub shake_window_ms: Millis,
    pub shake_debounce_ms: Millis,
    pub gravity_alpha: f64,
}

impl Default for GestureConfig {
    fn default() -> Self {
        Self {
            tap_max_ms: 300,
            tap_slop_dip: 10.0,
            double_tap_gap_ms: 300,
            double_tap_radius_dip: 24.0,
            swipe_min_velocity_dip_per_s: 800.0,
            swipe_max_duration_ms: 250,
            swipe_min_distance_dip: 60.0,
            shake_threshold_mps2: 20.0,
            shake_min_samples: 3,
            shake_window_ms: 500,
            shake_debounce_ms: 1000,
            gravity_alpha: 0.8,
        }
    }
}

impl GestureConfig {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("tapMaxMs", self.tap_max_ms as f64),
            ("tapSlopDip", self.tap_slop_dip),
            ("doubleTapGapMs", self.double_tap_gap_ms as f64),
            ("doubleTapRadiusDip", self.double_tap_radius_dip),
            ("swipeMinVelocityDipPerS", self.swipe_min_velocity_dip_per_s),
            ("swipeMaxDurationMs", self.swipe_max_duration_ms as f64),
            ("swipeMinDistanceDip", self.swipe_min_distance_dip),
            ("shakeThresholdMps2", self.shake_threshold_mps2),
            ("shakeMinSamples", self.shake_min_samples as f64),
            ("shakeWindowMs", self.shake_window_ms as f64),
            ("shakeDebounceMs", self.shake_debounce_ms as f64),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| v.is_nan() || *v <= 0.0) {
            return Err(format!("{name} must be positive, got {v}"));
        }
        if !(self.gravity_alpha > 0.0 && self.gravity_alpha < 1.0) {
            return Err(format!("gravityAlpha must be in (0, 1), got {}", self.gravity_alpha));
        }
        Ok(())
    }
}

/// One recorded input event. Serialized as a flat JSON object with a `kind` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawInputEvent {
    pub t: Millis,
    #[serde(flatten)]
    pub kind: RawKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum RawKind {
    TouchDown {
        #[serde(rename = "pointerId")]
        pointer_id: PointerId,
        x: f64,
        y: f64,
    },
    TouchMove {
        #[serde(rename = "pointerId")]
        pointer_id: PointerId,
        x: f64,
        y: f64,
    },
    TouchUp {
        #[serde(rename = "pointerId")]
        pointer_id: PointerId,
        x: f64,
        y: f64,
    },
    MotionSample {
        ax: f64,
        ay: f64,
        az: f64,
    },
    MenuCommand {
        command: String,
    },
    JoystickToggle,
    Flush,
}

impl RawInputEvent {
    pub fn new(t: Millis, kind: RawKind) -> Self {
        Self { t, kind }
    }

    pub fn down(t: Millis, pointer_id: PointerId, p: Point) -> Self {
        Self::new(t, RawKind::TouchDown { pointer_id, x: p.x, y: p.y })
    }

    pub fn moved(t: Millis, pointer_id: PointerId, p: Point) -> Self {
        Self::new(t, RawKind::TouchMove { pointer_id, x: p.x, y: p.y })
    }

    pub fn up(t: Millis, pointer_id: PointerId, p: Point) -> Self {
        Self::new(t, RawKind::TouchUp { pointer_id, x: p.x, y: p.y })
    }

    pub fn motion(t: Millis, accel: [f64; 3]) -> Self {
        Self::new(
            t,
            RawKind::MotionSample {
                ax: accel[0],
                ay: accel[1],
                az: accel[2],
            },
        )
    }

    pub fn menu(t: Millis, command: impl Into<String>) -> Self {
        Self::new(t, RawKind::MenuCommand { command: command.into() })
    }

    pub fn flush(t: Millis) -> Self {
        Self::new(t, RawKind::Flush)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DragKind {
    Lasso,
    Swipe,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "gesture", rename_all = "camelCase")]
pub enum GestureEvent {
    Tap {
        pos: Point,
    },
    DoubleTap {
        pos: Point,
    },
    DragStart {
        #[serde(rename = "pointerId")]
        pointer_id: PointerId,
        pos: Point,
    },
    DragMove {
        #[serde(rename = "pointerId")]
        pointer_id: PointerId,
        pos: Point,
        path: Vec<Point>,
    },
    DragEnd {
        #[serde(rename = "pointerId")]
        pointer_id: PointerId,
        path: Vec<Point>,
        #[serde(rename = "meanVelocity")]
        mean_velocity: f64,
        classification: DragKind,
    },
    Shake,
    MenuCommand {
        command: String,
    },
    JoystickToggle,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("pointer {pointer_id}: {event} without a matching touchDown")]
    OrphanPointer { pointer_id: PointerId, event: &'static str },
    #[error("pointer {0}: touchDown while already down")]
    DuplicateDown(PointerId),
    #[error("timestamp {t} precedes previous event at {last}")]
    TimeRegression { t: Millis, last: Millis },
}

impl ProtocolError {
    pub fn pointer_id(&self) -> Option<PointerId> {
        match self {
            ProtocolError::OrphanPointer { pointer_id, .. } => Some(*pointer_id),
            ProtocolError::DuplicateDown(p) => Some(*p),
            ProtocolError::TimeRegression { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Touch {
    down_t: Millis,
    down_pos: Point,
    path: Vec<Point>,
    max_displacement: f64,
    dragging: bool,
    /// This touch may complete a double tap with the pending tap.
    double_candidate: bool,
}

#[derive(Debug, Clone, PartialEq)]
struct PendingTap {
    pos: Point,
    deadline: Millis,
    candidate: Option<PointerId>,
}

fn path_length(path: &[Point]) -> f64 {
    path.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Gesture recognizer state. Every transition validates the event before
/// mutating anything, so a rejected event leaves the state untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct Recognizer {
    config: GestureConfig,
    clock: Option<Millis>,
    touches: BTreeMap<PointerId, Touch>,
    ignored: BTreeSet<PointerId>,
    pending: Option<PendingTap>,
    shake: ShakeDetector,
}

impl Recognizer {
    pub fn new(config: GestureConfig) -> Self {
        Self {
            config,
            clock: None,
            touches: BTreeMap::new(),
            ignored: BTreeSet::new(),
            pending: None,
            shake: ShakeDetector::default(),
        }
    }

    pub fn config(&self) -> &GestureConfig {
        &self.config
    }

    pub fn clock(&self) -> Option<Millis> {
        self.clock
    }

    pub fn has_pending_tap(&self) -> bool {
        self.pending.is_some()
    }

    pub fn active_pointers(&self) -> impl Iterator<Item = PointerId> + '_ {
        self.touches.keys().copied()
    }

    fn validate(&self, e: &RawInputEvent) -> Result<(), ProtocolError> {
        if let Some(last) = self.clock {
            if e.t < last {
                return Err(ProtocolError::TimeRegression { t: e.t, last });
            }
        }
        let known = |p: &PointerId| self.touches.contains_key(p) || self.ignored.contains(p);
        match &e.kind {
            RawKind::TouchDown { pointer_id, .. } if known(pointer_id) => {
                Err(ProtocolError::DuplicateDown(*pointer_id))
            }
            RawKind::TouchMove { pointer_id, .. } if !known(pointer_id) => Err(ProtocolError::OrphanPointer {
                pointer_id: *pointer_id,
                event: "touchMove",
            }),
            RawKind::TouchUp { pointer_id, .. } if !known(pointer_id) => Err(ProtocolError::OrphanPointer {
                pointer_id: *pointer_id,
                event: "touchUp",
            }),
            _ => Ok(()),
        }
    }

    /// Emits the pending tap once its double-tap window has closed, or once a
    /// second-tap candidate has been held too long to qualify.
    fn advance(&mut self, t: Millis, out: &mut Vec<GestureEvent>) {
        let Some(pending) = &self.pending else { return };
        let expired = match pending.candidate {
            Some(c) => self
                .touches
                .get(&c)
                .is_none_or(|touch| t - touch.down_t > self.config.tap_max_ms),
            None => t >= pending.deadline,
        };
        if expired {
            self.emit_pending(out);
        }
    }

    fn emit_pending(&mut self, out: &mut Vec<GestureEvent>) {
        if let Some(p) = self.pending.take() {
            if let Some(touch) = p.candidate.and_then(|c| self.touches.get_mut(&c)) {
                touch.double_candidate = false;
            }
            out.push(GestureEvent::Tap { pos: p.pos });
        }
    }

    /// Emits any deferred tap whose deadline is at or before `t`.
    pub fn flush(&mut self, t: Millis) -> Result<Vec<GestureEvent>, ProtocolError> {
        self.feed(&RawInputEvent::flush(t))
    }

    pub fn feed(&mut self, e: &RawInputEvent) -> Result<Vec<GestureEvent>, ProtocolError> {
        self.validate(e)?;
        let t = e.t;
        self.clock = Some(t);
        let mut out = Vec::new();
        self.advance(t, &mut out);
        match &e.kind {
            RawKind::TouchDown { pointer_id, x, y } => self.touch_down(t, *pointer_id, Point::new(*x, *y), &mut out),
            RawKind::TouchMove { pointer_id, x, y } => self.touch_move(*pointer_id, Point::new(*x, *y), &mut out),
            RawKind::TouchUp { pointer_id, x, y } => self.touch_up(t, *pointer_id, Point::new(*x, *y), &mut out),
            RawKind::MotionSample { ax, ay, az } => {
                if self.shake.sample(&self.config, t, [*ax, *ay, *az]) {
                    out.push(GestureEvent::Shake);
                }
            }
            RawKind::MenuCommand { command } => out.push(GestureEvent::MenuCommand {
                command: command.clone(),
            }),
            RawKind::JoystickToggle => out.push(GestureEvent::JoystickToggle),
            RawKind::Flush => {}
        }
        Ok(out)
    }

    fn touch_down(&mut self, t: Millis, id: PointerId, pos: Point, out: &mut Vec<GestureEvent>) {
        if self.touches.len() >= MAX_POINTERS {
            self.ignored.insert(id);
            return;
        }
        let mut double_candidate = false;
        if let Some(p) = &mut self.pending {
            if p.candidate.is_none() {
                if p.pos.distance(pos) <= self.config.double_tap_radius_dip {
                    p.candidate = Some(id);
                    double_candidate = true;
                } else {
                    self.emit_pending(out);
                }
            }
        }
        self.touches.insert(
            id,
            Touch {
                down_t: t,
                down_pos: pos,
                path: vec![pos],
                max_displacement: 0.0,
                dragging: false,
                double_candidate,
            },
        );
    }

    /// Promotes a touch to a drag, releasing any double-tap claim first.
    fn start_drag(&mut self, id: PointerId, out: &mut Vec<GestureEvent>) {
        let claimed = self.touches.get(&id).is_some_and(|t| t.double_candidate);
        if claimed {
            self.emit_pending(out);
        }
        if let Some(touch) = self.touches.get_mut(&id) {
            touch.dragging = true;
            out.push(GestureEvent::DragStart {
                pointer_id: id,
                pos: touch.down_pos,
            });
        }
    }

    fn touch_move(&mut self, id: PointerId, pos: Point, out: &mut Vec<GestureEvent>) {
        let slop = self.config.tap_slop_dip;
        let Some(touch) = self.touches.get_mut(&id) else {
            return; // ignored pointer
        };
        touch.path.push(pos);
        touch.max_displacement = touch.max_displacement.max(touch.down_pos.distance(pos));
        if !touch.dragging && touch.max_displacement > slop {
            self.start_drag(id, out);
        }
        if let Some(touch) = self.touches.get(&id).filter(|t| t.dragging) {
            out.push(GestureEvent::DragMove {
                pointer_id: id,
                pos,
                path: touch.path.clone(),
            });
        }
    }

    fn touch_up(&mut self, t: Millis, id: PointerId, pos: Point, out: &mut Vec<GestureEvent>) {
        if self.ignored.remove(&id) {
            return;
        }
        let slop = self.config.tap_slop_dip;
        if let Some(touch) = self.touches.get_mut(&id) {
            touch.path.push(pos);
            touch.max_displacement = touch.max_displacement.max(touch.down_pos.distance(pos));
            if !touch.dragging && touch.max_displacement > slop {
                self.start_drag(id, out);
            }
        }
        let Some(touch) = self.touches.remove(&id) else { return };
        let duration = t - touch.down_t;

        if touch.dragging {
            let length = path_length(&touch.path);
            // Zero-duration drags are treated as lasting 1 ms.
            let mean_velocity = length / (duration.max(1) as f64 / 1000.0);
            let swipe = duration <= self.config.swipe_max_duration_ms
                && length >= self.config.swipe_min_distance_dip
                && mean_velocity >= self.config.swipe_min_velocity_dip_per_s;
            out.push(GestureEvent::DragEnd {
                pointer_id: id,
                path: touch.path,
                mean_velocity,
                classification: if swipe { DragKind::Swipe } else { DragKind::Lasso },
            });
            return;
        }

        let is_tap = duration <= self.config.tap_max_ms;
        if touch.double_candidate {
            if is_tap {
                if let Some(p) = self.pending.take() {
                    out.push(GestureEvent::DoubleTap { pos: p.pos });
                }
            } else {
                self.emit_pending(out);
            }
        } else if is_tap {
            self.emit_pending(out);
            self.pending = Some(PendingTap {
                pos: touch.down_pos,
                deadline: t + self.config.double_tap_gap_ms,
                candidate: None,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(events: &[RawInputEvent]) -> Vec<GestureEvent> {
        let mut r = Recognizer::new(GestureConfig::default());
        events.iter().flat_map(|e| r.feed(e).unwrap()).collect()
    }

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn single_tap_after_gap() {
        let out = run(&[
            RawInputEvent::down(0, 1, p(100.0, 100.0)),
            RawInputEvent::up(120, 1, p(103.0, 101.0)),
            RawInputEvent::flush(500),
        ]);
        assert_eq!(out, vec![GestureEvent::Tap { pos: p(100.0, 100.0) }]);
    }

    #[test]
    fn double_tap_suppresses_taps() {
        let a = p(50.0, 60.0);
        let out = run(&[
            RawInputEvent::down(0, 1, a),
            RawInputEvent::up(100, 1, a),
            RawInputEvent::down(250, 1, a),
            RawInputEvent::up(350, 1, a),
            RawInputEvent::flush(2000),
        ]);
        assert_eq!(out, vec![GestureEvent::DoubleTap { pos: a }]);
    }

    #[test]
    fn second_tap_far_away_is_two_taps() {
        let out = run(&[
            RawInputEvent::down(0, 1, p(0.0, 0.0)),
            RawInputEvent::up(100, 1, p(0.0, 0.0)),
            RawInputEvent::down(200, 1, p(100.0, 0.0)),
            RawInputEvent::up(250, 1, p(100.0, 0.0)),
            RawInputEvent::flush(1000),
        ]);
        assert_eq!(
            out,
            vec![
                GestureEvent::Tap { pos: p(0.0, 0.0) },
                GestureEvent::Tap { pos: p(100.0, 0.0) }
            ]
        );
    }

    #[test]
    fn flush_deadline_is_inclusive() {
        let mut r = Recognizer::new(GestureConfig::default());
        r.feed(&RawInputEvent::down(-100, 1, p(1.0, 1.0))).unwrap();
        r.feed(&RawInputEvent::up(0, 1, p(1.0, 1.0))).unwrap();
        assert!(r.flush(299).unwrap().is_empty());
        assert_eq!(r.flush(300).unwrap(), vec![GestureEvent::Tap { pos: p(1.0, 1.0) }]);
        assert!(r.flush(5000).unwrap().is_empty());
    }

    #[test]
    fn fast_horizontal_drag_is_swipe() {
        let mut events = vec![RawInputEvent::down(0, 1, p(100.0, 300.0))];
        for i in 1..=5 {
            events.push(RawInputEvent::moved(i * 30, 1, p(100.0 + 40.0 * i as f64, 300.0)));
        }
        events.push(RawInputEvent::up(150, 1, p(300.0, 300.0)));
        let out = run(&events);
        assert_eq!(out[0], GestureEvent::DragStart { pointer_id: 1, pos: p(100.0, 300.0) });
        match out.last().unwrap() {
            GestureEvent::DragEnd {
                classification,
                mean_velocity,
                ..
            } => {
                assert_eq!(*classification, DragKind::Swipe);
                assert!((mean_velocity - 200.0 / 0.15).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn slow_drag_is_lasso() {
        let out = run(&[
            RawInputEvent::down(0, 1, p(0.0, 0.0)),
            RawInputEvent::moved(400, 1, p(50.0, 0.0)),
            RawInputEvent::moved(800, 1, p(50.0, 50.0)),
            RawInputEvent::up(1200, 1, p(0.0, 50.0)),
        ]);
        assert!(matches!(
            out.last(),
            Some(GestureEvent::DragEnd { classification: DragKind::Lasso, path, .. }) if path.len() == 4
        ));
    }

    #[test]
    fn drag_during_double_tap_window_releases_pending_tap() {
        let a = p(10.0, 10.0);
        let out = run(&[
            RawInputEvent::down(0, 1, a),
            RawInputEvent::up(50, 1, a),
            RawInputEvent::down(100, 1, a),
            RawInputEvent::moved(120, 1, p(40.0, 10.0)),
            RawInputEvent::up(600, 1, p(40.0, 10.0)),
        ]);
        assert_eq!(out[0], GestureEvent::Tap { pos: a });
        assert!(matches!(out[1], GestureEvent::DragStart { .. }));
        assert!(!out.iter().any(|g| matches!(g, GestureEvent::DoubleTap { .. })));
    }

    #[test]
    fn protocol_errors_leave_state_unchanged() {
        let mut r = Recognizer::new(GestureConfig::default());
        r.feed(&RawInputEvent::down(10, 1, p(0.0, 0.0))).unwrap();
        let before = r.clone();
        assert_eq!(
            r.feed(&RawInputEvent::up(20, 7, p(0.0, 0.0))),
            Err(ProtocolError::OrphanPointer { pointer_id: 7, event: "touchUp" })
        );
        assert_eq!(
            r.feed(&RawInputEvent::moved(5, 1, p(0.0, 0.0))),
            Err(ProtocolError::TimeRegression { t: 5, last: 10 })
        );
        assert_eq!(r.feed(&RawInputEvent::down(20, 1, p(0.0, 0.0))), Err(ProtocolError::DuplicateDown(1)));
        assert_eq!(r, before);
    }

    #[test]
    fn third_pointer_is_ignored() {
        let out = run(&[
            RawInputEvent::down(0, 1, p(0.0, 0.0)),
            RawInputEvent::down(0, 2, p(100.0, 0.0)),
            RawInputEvent::down(0, 3, p(200.0, 0.0)),
            RawInputEvent::moved(500, 3, p(300.0, 100.0)),
            RawInputEvent::up(900, 3, p(300.0, 100.0)),
        ]);
        assert!(out.is_empty());
    }

    #[test]
    fn wire_format() {
        let e = RawInputEvent::down(5, 2, p(1.5, 2.0));
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(text, r#"{"t":5,"kind":"touchDown","pointerId":2,"x":1.5,"y":2.0}"#);
        let back: RawInputEvent = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
        let f: RawInputEvent = serde_json::from_str(r#"{"t":9,"kind":"flush"}"#).unwrap();
        assert_eq!(f, RawInputEvent::flush(9));
    }
}
