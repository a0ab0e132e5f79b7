//! Session controller: feeds raw input through the recognizer, routes each
//! gesture by what lies under its origin, and reports renderer updates.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::aggregate::{aggregate_rows, default_aggregate_spec, AggOp, AggregateError, AggregateSpec};
use crate::chart::{hit_test, layout, ChartError, ChartSpec, ChartType, HitTarget, MarkScene};
use crate::config::{ConfigError, EngineConfig};
use crate::data::Dataset;
use crate::geom::Point;
use crate::gesture::{DragKind, GestureEvent, PointerId, ProtocolError, RawInputEvent, Recognizer};
use crate::history::{History, HistoryError};
use crate::inspect::{
    start_joystick, tooltip_for, update_inspection, update_joystick, Axis, InspectError, InspectionState,
    TooltipPayload,
};
use crate::select::{
    axis_tap_select, focus, lasso_select, legend_select, remove_selection, tap_mark, SelectError,
};
use crate::snapshot::Canon;
use crate::view::{AggregateView, Selection, ViewState};

pub const UPDATE_VERSION: u32 = 1;

/// The thirteen user-facing interactions, used to check trace coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Interaction {
    TwoFingerInspect,
    SingleFingerInspect,
    LassoSelect,
    TapSelect,
    AxisTapSelect,
    Focus,
    Remove,
    AggregateMerge,
    AggregateBy,
    AggregateOp,
    Reset,
    Undo,
    Redo,
}

impl Interaction {
    pub const ALL: [Interaction; 13] = [
        Interaction::TwoFingerInspect,
        Interaction::SingleFingerInspect,
        Interaction::LassoSelect,
        Interaction::TapSelect,
        Interaction::AxisTapSelect,
        Interaction::Focus,
        Interaction::Remove,
        Interaction::AggregateMerge,
        Interaction::AggregateBy,
        Interaction::AggregateOp,
        Interaction::Reset,
        Interaction::Undo,
        Interaction::Redo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Interaction::TwoFingerInspect => "twoFingerInspect",
            Interaction::SingleFingerInspect => "singleFingerInspect",
            Interaction::LassoSelect => "lassoSelect",
            Interaction::TapSelect => "tapSelect",
            Interaction::AxisTapSelect => "axisTapSelect",
            Interaction::Focus => "focus",
            Interaction::Remove => "remove",
            Interaction::AggregateMerge => "aggregateMerge",
            Interaction::AggregateBy => "aggregateBy",
            Interaction::AggregateOp => "aggregateOp",
            Interaction::Reset => "reset",
            Interaction::Undo => "undo",
            Interaction::Redo => "redo",
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error(transparent)]
    Inspect(#[from] InspectError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown menu command `{0}`")]
    UnknownCommand(String),
    #[error("the view is already aggregated; change the grouping or operator instead")]
    AlreadyAggregated,
}

impl EngineError {
    /// Stable identifier carried in error updates.
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::Protocol(_) => "protocolError",
            EngineError::Chart(_) => "chartError",
            EngineError::Select(SelectError::NoTarget) => "noTarget",
            EngineError::Select(SelectError::FocusRequiresSelection) => "focusRequiresSelection",
            EngineError::Select(SelectError::RemoveWouldEmptyView) => "removeWouldEmptyView",
            EngineError::Select(SelectError::Chart(_)) => "chartError",
            EngineError::Aggregate(AggregateError::RequiresSelection) => "aggregateRequiresSelection",
            EngineError::Aggregate(_) => "specError",
            EngineError::History(HistoryError::NothingToUndo) => "nothingToUndo",
            EngineError::History(HistoryError::NothingToRedo) => "nothingToRedo",
            EngineError::Inspect(InspectError::EmptySteps) => "emptySteps",
            EngineError::Inspect(InspectError::InspectionUnavailable) => "inspectionUnavailable",
            EngineError::Inspect(InspectError::AxisUnavailable(_)) => "axisUnavailable",
            EngineError::Config(_) => "configError",
            EngineError::UnknownCommand(_) => "unknownCommand",
            EngineError::AlreadyAggregated => "alreadyAggregated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MenuState {
    pub can_undo: bool,
    pub can_redo: bool,
    pub aggregate_enabled: bool,
    pub joystick: bool,
    pub aggregate_view: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum UpdateKind {
    SceneChanged {
        scene: Box<MarkScene>,
        selection: Selection,
    },
    InspectionChanged {
        inspection: InspectionState,
        #[serde(rename = "lassoPath")]
        lasso_path: Option<Vec<Point>>,
    },
    SelectionChanged {
        selection: Selection,
    },
    Tooltip {
        tooltip: TooltipPayload,
    },
    MenuStateChanged {
        menu: MenuState,
    },
    Error {
        code: String,
        message: String,
    },
}

/// Renderer-facing message, serialized as a JSON object with `"v":1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewUpdate {
    pub v: u32,
    #[serde(flatten)]
    pub kind: UpdateKind,
}

impl ViewUpdate {
    pub fn new(kind: UpdateKind) -> Self {
        Self { v: UPDATE_VERSION, kind }
    }

    pub fn error(e: &EngineError) -> Self {
        Self::new(UpdateKind::Error {
            code: e.code().to_string(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DragRole {
    Axis(Axis),
    Joystick,
    Lasso,
    Ignored,
}

/// Layout of the chart currently on screen. For aggregate views the chart
/// and rows are the derived ones.
#[derive(Debug, Clone)]
struct Rendered {
    derived: Option<(Dataset, ChartSpec)>,
    scene: MarkScene,
}

#[derive(Debug, Clone)]
pub struct Engine {
    spec: ChartSpec,
    data: Dataset,
    config: EngineConfig,
    history: History,
    recognizer: Recognizer,
    inspection: InspectionState,
    drags: BTreeMap<PointerId, DragRole>,
    lasso_path: Option<Vec<Point>>,
    rendered: Rendered,
    interactions: Vec<Interaction>,
}

impl Engine {
    pub fn new(spec: ChartSpec, data: Dataset, config: EngineConfig) -> Result<Self, EngineError> {
        config.validate()?;
        let initial = ViewState::all_visible(data.len());
        let rendered = render(&spec, &data, &config, &initial)?;
        Ok(Self {
            history: History::new(initial, config.history_cap),
            recognizer: Recognizer::new(config.gesture.clone()),
            spec,
            data,
            config,
            inspection: InspectionState::default(),
            drags: BTreeMap::new(),
            lasso_path: None,
            rendered,
            interactions: Vec::new(),
        })
    }

    pub fn view(&self) -> &ViewState {
        self.history.current()
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn scene(&self) -> &MarkScene {
        &self.rendered.scene
    }

    pub fn inspection(&self) -> &InspectionState {
        &self.inspection
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    /// The chart and rows on screen (derived ones in an aggregate view).
    pub fn chart(&self) -> (&ChartSpec, &Dataset) {
        match &self.rendered.derived {
            Some((data, spec)) => (spec, data),
            None => (&self.spec, &self.data),
        }
    }

    /// Interactions that took effect, in order.
    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    pub fn menu_state(&self) -> MenuState {
        let view = self.view();
        MenuState {
            can_undo: self.history.can_undo(),
            can_redo: self.history.can_redo(),
            aggregate_enabled: !view.selection.is_empty() || view.aggregate.is_some(),
            joystick: self.inspection.joystick_enabled,
            aggregate_view: view.aggregate.is_some(),
        }
    }

    /// Canonical snapshot of the view plus summary scene statistics. Inspection
    /// and history depth are excluded.
    pub fn snapshot(&self) -> Canon {
        let scene = &self.rendered.scene;
        Canon::obj([
            (
                "scene",
                Canon::obj([
                    ("chartType", Canon::str(chart_type_name(scene))),
                    ("filteredLegendEntries", Canon::Int(scene.legend.iter().filter(|e| e.filtered).count() as i64)),
                    ("markCount", Canon::Int(scene.marks.len() as i64)),
                    ("xDomain", scene.x_scale.domain.canon()),
                    ("yDomain", scene.y_scale.domain.canon()),
                ]),
            ),
            ("view", self.view().canon()),
        ])
    }

    /// Feeds one raw event. Protocol errors become an error update and leave
    /// the engine untouched.
    pub fn process_raw(&mut self, e: &RawInputEvent) -> Vec<ViewUpdate> {
        match self.try_process_raw(e) {
            Ok(updates) => updates,
            Err(err) => vec![ViewUpdate::error(&EngineError::Protocol(err))],
        }
    }

    pub fn try_process_raw(&mut self, e: &RawInputEvent) -> Result<Vec<ViewUpdate>, ProtocolError> {
        let gestures = self.recognizer.feed(e)?;
        Ok(gestures.iter().flat_map(|g| self.dispatch(g)).collect())
    }

    /// Routes one gesture and reports what changed.
    pub fn dispatch(&mut self, g: &GestureEvent) -> Vec<ViewUpdate> {
        let before_view = self.view().clone();
        let before_inspection = self.inspection.clone();
        let before_lasso = self.lasso_path.clone();
        let before_menu = self.menu_state();

        let mut updates = Vec::new();
        if let Err(e) = self.route(g) {
            updates.push(ViewUpdate::error(&e));
        }

        let view = self.view();
        if !same_scene(&before_view, view) {
            updates.push(ViewUpdate::new(UpdateKind::SceneChanged {
                scene: Box::new(self.rendered.scene.clone()),
                selection: view.selection.clone(),
            }));
        } else if before_view.selection != view.selection {
            updates.push(ViewUpdate::new(UpdateKind::SelectionChanged {
                selection: view.selection.clone(),
            }));
        }
        if before_inspection != self.inspection || before_lasso != self.lasso_path {
            updates.push(ViewUpdate::new(UpdateKind::InspectionChanged {
                inspection: self.inspection.clone(),
                lasso_path: self.lasso_path.clone(),
            }));
            if before_inspection.active_mark_ids != self.inspection.active_mark_ids {
                let (spec, data) = self.chart();
                updates.push(ViewUpdate::new(UpdateKind::Tooltip {
                    tooltip: tooltip_for(&self.rendered.scene, spec, data, &self.inspection.active_mark_ids),
                }));
            }
        }
        let menu = self.menu_state();
        if menu != before_menu {
            updates.push(ViewUpdate::new(UpdateKind::MenuStateChanged { menu }));
        }
        updates
    }

    fn route(&mut self, g: &GestureEvent) -> Result<(), EngineError> {
        match g {
            GestureEvent::Tap { pos } => self.on_tap(*pos),
            GestureEvent::DoubleTap { .. } => {
                let (spec, data) = self.chart();
                let next = focus(self.view(), spec, data)?;
                self.push_view(next, Interaction::Focus)
            }
            GestureEvent::DragStart { pointer_id, pos } => self.on_drag_start(*pointer_id, *pos),
            GestureEvent::DragMove { pointer_id, pos, path } => self.on_drag_move(*pointer_id, *pos, path),
            GestureEvent::DragEnd {
                pointer_id,
                path,
                classification,
                ..
            } => self.on_drag_end(*pointer_id, path, *classification),
            GestureEvent::Shake => self.reset(),
            GestureEvent::MenuCommand { command } => self.on_menu(command),
            GestureEvent::JoystickToggle => {
                self.inspection.joystick_enabled = !self.inspection.joystick_enabled;
                self.inspection.joystick = None;
                Ok(())
            }
        }
    }

    fn on_tap(&mut self, pos: Point) -> Result<(), EngineError> {
        let scene = &self.rendered.scene;
        let view = self.view();
        match hit_test(scene, pos, self.config.hit_tolerance_dip) {
            HitTarget::Mark { id } => {
                let selection = tap_mark(scene, &view.selection, id)?;
                self.push_view(view.with_selection(selection), Interaction::TapSelect)
            }
            HitTarget::Legend { category } => {
                let (spec, data) = self.chart();
                let selection = legend_select(scene, spec, data, view, &view.selection, &category)?;
                self.push_view(view.with_selection(selection), Interaction::TapSelect)
            }
            HitTarget::AxisX | HitTarget::AxisY => {
                let selection = axis_tap_select(scene, &self.inspection.active_mark_ids, &view.selection);
                self.push_view(view.with_selection(selection), Interaction::AxisTapSelect)
            }
            HitTarget::Background => {
                let next = view.with_selection(Selection::empty());
                self.inspection = self.inspection.cleared();
                self.push_view(next, Interaction::TapSelect)
            }
        }
    }

    fn on_drag_start(&mut self, pointer: PointerId, pos: Point) -> Result<(), EngineError> {
        let scene = &self.rendered.scene;
        let role = if scene.axis_x.contains(pos) {
            DragRole::Axis(Axis::X)
        } else if scene.axis_y.contains(pos) {
            // Bars are inspected along x only.
            if scene.chart_type == ChartType::Bar {
                DragRole::Ignored
            } else {
                DragRole::Axis(Axis::Y)
            }
        } else if scene.plot.contains(pos) {
            if !self.inspection.joystick_enabled {
                DragRole::Lasso
            } else if self.inspection.joystick.is_none() {
                DragRole::Joystick
            } else {
                DragRole::Ignored
            }
        } else {
            DragRole::Ignored
        };
        self.drags.insert(pointer, role);
        match role {
            DragRole::Axis(axis) => self.inspect_axis(pointer, axis, pos),
            DragRole::Joystick => {
                self.inspection = start_joystick(
                    scene,
                    &self.inspection,
                    pointer,
                    pos,
                    self.config.thumb_range_fraction,
                )?;
                self.log(Interaction::SingleFingerInspect);
                Ok(())
            }
            DragRole::Lasso => {
                self.lasso_path = Some(vec![pos]);
                Ok(())
            }
            DragRole::Ignored => Ok(()),
        }
    }

    fn inspect_axis(&mut self, pointer: PointerId, axis: Axis, pos: Point) -> Result<(), EngineError> {
        self.inspection = update_inspection(&self.rendered.scene, &self.inspection, axis, Some(pointer), pos)?;
        self.log(Interaction::TwoFingerInspect);
        Ok(())
    }

    fn on_drag_move(&mut self, pointer: PointerId, pos: Point, path: &[Point]) -> Result<(), EngineError> {
        match self.drags.get(&pointer).copied() {
            Some(DragRole::Axis(axis)) => self.inspect_axis(pointer, axis, pos),
            Some(DragRole::Joystick) => {
                self.inspection = update_joystick(&self.rendered.scene, &self.inspection, pos)?;
                self.log(Interaction::SingleFingerInspect);
                Ok(())
            }
            Some(DragRole::Lasso) => {
                self.lasso_path = Some(path.to_vec());
                Ok(())
            }
            Some(DragRole::Ignored) | None => Ok(()),
        }
    }

    fn on_drag_end(&mut self, pointer: PointerId, path: &[Point], kind: DragKind) -> Result<(), EngineError> {
        let role = self.drags.remove(&pointer);
        if role == Some(DragRole::Lasso) {
            self.lasso_path = None;
        }
        if role == Some(DragRole::Joystick) {
            self.inspection.joystick = None;
        }
        for line in &mut self.inspection.lines {
            if line.owner == Some(pointer) {
                line.owner = None;
            }
        }
        match kind {
            DragKind::Swipe => {
                self.inspection = self.inspection.cleared();
                let next = remove_selection(self.view())?;
                self.push_view(next, Interaction::Remove)
            }
            DragKind::Lasso if role == Some(DragRole::Lasso) => {
                let selection = lasso_select(&self.rendered.scene, path);
                let next = self.view().with_selection(selection);
                self.push_view(next, Interaction::LassoSelect)
            }
            DragKind::Lasso => Ok(()),
        }
    }

    fn on_menu(&mut self, command: &str) -> Result<(), EngineError> {
        match command {
            "history.undo" => self.step_history(true),
            "history.redo" => self.step_history(false),
            "view.reset" => self.reset(),
            "aggregate.merge" => {
                if self.view().aggregate.is_some() {
                    return Err(EngineError::AlreadyAggregated);
                }
                let spec = default_aggregate_spec(&self.spec, self.config.target_bins);
                self.aggregate(spec, Interaction::AggregateMerge)
            }
            _ => {
                if let Some(field) = command.strip_prefix("aggregate.by:") {
                    let mut spec = self.current_aggregate_spec();
                    spec.group_by = field.to_string();
                    self.aggregate(spec, Interaction::AggregateBy)
                } else if let Some(op) = command.strip_prefix("aggregate.op:") {
                    let mut spec = self.current_aggregate_spec();
                    spec.op = op.parse::<AggOp>()?;
                    self.aggregate(spec, Interaction::AggregateOp)
                } else {
                    Err(EngineError::UnknownCommand(command.to_string()))
                }
            }
        }
    }

    fn current_aggregate_spec(&self) -> AggregateSpec {
        match &self.view().aggregate {
            Some(a) => a.spec.clone(),
            None => default_aggregate_spec(&self.spec, self.config.target_bins),
        }
    }

    /// Aggregates the remembered base selection in an aggregate view, otherwise
    /// the current selection.
    fn aggregate(&mut self, spec: AggregateSpec, interaction: Interaction) -> Result<(), EngineError> {
        let view = self.view();
        let base = match &view.aggregate {
            Some(a) => a.base_selection.clone(),
            None => view.selection.row_ids().clone(),
        };
        let derived = aggregate_rows(&self.data, &self.spec, &base, &spec)?;
        let mut next = ViewState::all_visible(derived.data.len());
        next.aggregate = Some(AggregateView {
            spec,
            base_selection: base,
        });
        self.push_view(next, interaction)
    }

    fn reset(&mut self) -> Result<(), EngineError> {
        let mut history = self.history.clone();
        if history.reset() {
            self.commit(history)?;
            self.log(Interaction::Reset);
        }
        Ok(())
    }

    fn step_history(&mut self, undo: bool) -> Result<(), EngineError> {
        let mut history = self.history.clone();
        if undo {
            history.undo()?;
        } else {
            history.redo()?;
        }
        self.commit(history)?;
        self.log(if undo { Interaction::Undo } else { Interaction::Redo });
        Ok(())
    }

    /// Pushes `next` unless it equals the current view.
    fn push_view(&mut self, next: ViewState, interaction: Interaction) -> Result<(), EngineError> {
        if &next == self.view() {
            return Ok(());
        }
        let mut history = self.history.clone();
        history.push(next);
        self.commit(history)?;
        self.log(interaction);
        Ok(())
    }

    /// Installs `history`, re-rendering first so a failure changes nothing.
    fn commit(&mut self, history: History) -> Result<(), EngineError> {
        let scene_changed = !same_scene(self.view(), history.current());
        if scene_changed {
            self.rendered = render(&self.spec, &self.data, &self.config, history.current())?;
            self.inspection = self.inspection.cleared();
            self.drags
                .values_mut()
                .filter(|r| **r != DragRole::Lasso)
                .for_each(|r| *r = DragRole::Ignored);
        }
        self.history = history;
        Ok(())
    }

    fn log(&mut self, interaction: Interaction) {
        self.interactions.push(interaction);
    }

    /// Interactions exercised so far, deduplicated.
    pub fn coverage(&self) -> BTreeSet<Interaction> {
        self.interactions.iter().copied().collect()
    }
}

fn same_scene(a: &ViewState, b: &ViewState) -> bool {
    a.visible == b.visible && a.overrides == b.overrides && a.aggregate == b.aggregate
}

fn chart_type_name(scene: &MarkScene) -> &'static str {
    match scene.chart_type {
        ChartType::Scatter => "scatter",
        ChartType::Bar => "bar",
        ChartType::Multiline => "multiline",
    }
}

fn render(spec: &ChartSpec, data: &Dataset, config: &EngineConfig, view: &ViewState) -> Result<Rendered, EngineError> {
    let params = config.layout_params();
    match &view.aggregate {
        None => Ok(Rendered {
            derived: None,
            scene: layout(spec, data, view, &params)?,
        }),
        Some(a) => {
            let out = aggregate_rows(data, spec, &a.base_selection, &a.spec)?;
            let scene = layout(&out.spec, &out.data, view, &params)?;
            Ok(Rendered {
                derived: Some((out.data, out.spec)),
                scene,
            })
        }
    }
}
