//! The discrete, undoable visualization state.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::aggregate::AggregateSpec;
use crate::chart::Domain;
use crate::data::RowId;
use crate::snapshot::Canon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Provenance {
    None,
    Tap,
    Legend,
    Lasso,
    AxisTap,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::None => "none",
            Provenance::Tap => "tap",
            Provenance::Legend => "legend",
            Provenance::Lasso => "lasso",
            Provenance::AxisTap => "axisTap",
        }
    }
}

/// Selected rows. Provenance is `None` exactly when the set is empty.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Selection {
    row_ids: BTreeSet<RowId>,
    provenance: Option<Provenance>,
}

impl Selection {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(row_ids: BTreeSet<RowId>, provenance: Provenance) -> Self {
        if row_ids.is_empty() || provenance == Provenance::None {
            Self::empty()
        } else {
            Self {
                row_ids,
                provenance: Some(provenance),
            }
        }
    }

    pub fn row_ids(&self) -> &BTreeSet<RowId> {
        &self.row_ids
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance.unwrap_or(Provenance::None)
    }

    pub fn is_empty(&self) -> bool {
        self.row_ids.is_empty()
    }

    pub fn len(&self) -> usize {
        self.row_ids.len()
    }

    pub fn canon(&self) -> Canon {
        Canon::obj([
            ("provenance", Canon::str(self.provenance().as_str())),
            ("rowIds", Canon::ints(self.row_ids.iter().copied())),
        ])
    }
}

/// Explicit per-axis scale domains. `None` means "derive from the full dataset".
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DomainOverrides {
    pub x: Option<Domain>,
    pub y: Option<Domain>,
}

impl DomainOverrides {
    pub fn is_empty(&self) -> bool {
        self.x.is_none() && self.y.is_none()
    }
}

/// Marks a view as an aggregate of `base_selection` under `spec`. While set,
/// row ids elsewhere in the [`ViewState`] refer to rows of the derived dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AggregateView {
    pub spec: AggregateSpec,
    pub base_selection: BTreeSet<RowId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ViewState {
    pub visible: BTreeSet<RowId>,
    pub overrides: DomainOverrides,
    pub selection: Selection,
    pub aggregate: Option<AggregateView>,
}

impl ViewState {
    /// Everything visible, no overrides, nothing selected.
    pub fn all_visible(row_count: usize) -> Self {
        Self {
            visible: (0..row_count as RowId).collect(),
            overrides: DomainOverrides::default(),
            selection: Selection::empty(),
            aggregate: None,
        }
    }

    pub fn with_selection(&self, selection: Selection) -> Self {
        Self {
            selection,
            ..self.clone()
        }
    }

    pub fn canon(&self) -> Canon {
        let domain = |d: &Option<Domain>| d.as_ref().map_or(Canon::Null, Domain::canon);
        let aggregate = match &self.aggregate {
            None => Canon::Null,
            Some(a) => Canon::obj([
                ("baseSelection", Canon::ints(a.base_selection.iter().copied())),
                ("spec", a.spec.canon()),
            ]),
        };
        Canon::obj([
            ("aggregate", aggregate),
            (
                "overrides",
                Canon::obj([("x", domain(&self.overrides.x)), ("y", domain(&self.overrides.y))]),
            ),
            ("selection", self.selection.canon()),
            ("visibleRowIds", Canon::ints(self.visible.iter().copied())),
        ])
    }
}
