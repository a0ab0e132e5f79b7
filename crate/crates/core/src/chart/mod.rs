//! Chart specification, scales, mark layout and hit-testing.

mod hit;
mod layout;
mod scale;
mod spec;

use thiserror::Error;

pub use hit::{hit_test, HitTarget};
pub use layout::{auto_domains, layout, LayoutParams, LegendEntry, Mark, MarkId, MarkScene, MarkShape, SeriesLine};
pub use scale::{band_categories, compute_scale, padded_extent, Domain, Scale, ScaleKind, DOMAIN_PADDING};
pub use spec::{ChartSpec, ChartType, Encoding, Encodings, Margins, SpecDocument};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartError {
    #[error("cannot build a scale from no values")]
    EmptyDomain,
    #[error("{0}")]
    Spec(String),
}
