//! Aggregation of a selection into a derived bar chart, with automatic
//! "nice" binning for quantitative and temporal group-by fields.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::{ChartSpec, ChartType, Encoding, Encodings};
use crate::data::{format_time, Dataset, Field, FieldType, RowId, Schema, Value};
use crate::snapshot::{format_number, Canon};
use crate::view::{AggregateView, Selection, ViewState};

pub const DEFAULT_TARGET_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggOp {
    Count,
    Sum,
    Mean,
    Min,
    Max,
    Median,
}

impl AggOp {
    pub const ALL: [AggOp; 6] = [AggOp::Count, AggOp::Sum, AggOp::Mean, AggOp::Min, AggOp::Max, AggOp::Median];

    pub fn as_str(self) -> &'static str {
        match self {
            AggOp::Count => "count",
            AggOp::Sum => "sum",
            AggOp::Mean => "mean",
            AggOp::Min => "min",
            AggOp::Max => "max",
            AggOp::Median => "median",
        }
    }

    /// Applies the operator to a non-empty group.
    pub fn apply(self, values: &[f64]) -> f64 {
        match self {
            AggOp::Count => values.len() as f64,
            AggOp::Sum => values.iter().sum(),
            AggOp::Mean => values.iter().sum::<f64>() / values.len() as f64,
            AggOp::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
            AggOp::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            AggOp::Median => {
                let mut sorted = values.to_vec();
                sorted.sort_by(f64::total_cmp);
                let mid = sorted.len() / 2;
                if sorted.len().is_multiple_of(2) {
                    (sorted[mid - 1] + sorted[mid]) / 2.0
                } else {
                    sorted[mid]
                }
            }
        }
    }
}

impl fmt::Display for AggOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AggOp {
    type Err = AggregateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AggOp::ALL
            .into_iter()
            .find(|op| op.as_str() == s)
            .ok_or_else(|| AggregateError::Spec(format!("unknown aggregate operator `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AggregateSpec {
    pub group_by: String,
    pub measure: String,
    pub op: AggOp,
    pub target_bins: usize,
}

impl AggregateSpec {
    pub fn canon(&self) -> Canon {
        Canon::obj([
            ("groupBy", Canon::str(&self.group_by)),
            ("measure", Canon::str(&self.measure)),
            ("op", Canon::str(self.op.as_str())),
            ("targetBins", Canon::Int(self.target_bins as i64)),
        ])
    }

    /// Name of the aggregated value column in the derived dataset.
    pub fn value_field(&self) -> String {
        match self.op {
            AggOp::Count => "count".to_string(),
            op => format!("{op}({})", self.measure),
        }
    }
}

/// Groups by the chart's x field; the mean of y when y is quantitative,
/// otherwise a count.
pub fn default_aggregate_spec(spec: &ChartSpec, target_bins: usize) -> AggregateSpec {
    let op = if spec.encoding.y.field_type == FieldType::Quantitative {
        AggOp::Mean
    } else {
        AggOp::Count
    };
    AggregateSpec {
        group_by: spec.encoding.x.field.clone(),
        measure: spec.encoding.y.field.clone(),
        op,
        target_bins,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregateError {
    #[error("aggregation requires a non-empty selection")]
    RequiresSelection,
    #[error("cannot bin an empty or non-finite set of values")]
    EmptyValues,
    #[error("{0}")]
    Spec(String),
}

/// A half-open bin `[lo, hi)`; the last bin of a set is closed `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub closed: bool,
}

impl Bin {
    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && (v < self.hi || (self.closed && v <= self.hi))
    }
}

/// `n * 10^exp`, dividing for negative exponents so decimal steps such as
/// 0.5 or 0.2 land on the correctly rounded double.
fn scaled(n: f64, exp: i32) -> f64 {
    if exp >= 0 {
        n * 10f64.powi(exp)
    } else {
        n / 10f64.powi(-exp)
    }
}

/// Smallest step of the form `{1, 2, 5} * 10^k` that is `>= raw`, as
/// `(mantissa, k)`.
pub fn nice_step(raw: f64) -> (f64, i32) {
    let e0 = raw.log10().floor() as i32;
    for exp in (e0 - 1)..=(e0 + 1) {
        for m in [1.0, 2.0, 5.0] {
            if scaled(m, exp) >= raw {
                return (m, exp);
            }
        }
    }
    (1.0, e0 + 2)
}

/// Bins aligned to multiples of a nice step covering `[min, max]`.
pub fn nice_bins(values: &[f64], target_bins: usize) -> Result<Vec<Bin>, AggregateError> {
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(AggregateError::EmptyValues);
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Ok(vec![Bin {
            lo: min,
            hi: max,
            closed: true,
        }]);
    }
    let target = target_bins.max(1) as f64;
    let (m, exp) = nice_step((max - min) / target);
    let step = scaled(m, exp);
    let edge = |k: i64| scaled(k as f64 * m, exp);

    let mut lo = (min / step).floor() as i64;
    while edge(lo + 1) <= min {
        lo += 1;
    }
    while edge(lo) > min {
        lo -= 1;
    }
    let mut hi = (max / step).ceil() as i64;
    while hi - 1 > lo && edge(hi - 1) >= max {
        hi -= 1;
    }
    while edge(hi) < max {
        hi += 1;
    }
    Ok((lo..hi)
        .map(|k| Bin {
            lo: edge(k),
            hi: edge(k + 1),
            closed: k + 1 == hi,
        })
        .collect())
}

/// Index of the bin containing `v`.
pub fn bin_index(bins: &[Bin], v: f64) -> Option<usize> {
    let i = bins.partition_point(|b| b.lo <= v).checked_sub(1)?;
    bins[i].contains(v).then_some(i)
}

/// One output row of an aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub label: String,
    pub rows: Vec<RowId>,
    pub value: f64,
}

/// The derived chart produced by aggregating a set of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregated {
    pub groups: Vec<Group>,
    pub data: Dataset,
    pub spec: ChartSpec,
}

fn bin_label(bin: &Bin, field_type: FieldType) -> String {
    let fmt = |v: f64| match field_type {
        FieldType::Temporal => format_time(v as i64),
        _ => format_number(v),
    };
    let close = if bin.closed { ']' } else { ')' };
    format!("[{}, {}{close}", fmt(bin.lo), fmt(bin.hi))
}

/// Groups `rows` of `data` per `agg` and builds the derived bar chart. Empty
/// bins are dropped.
pub fn aggregate_rows(
    data: &Dataset,
    base: &ChartSpec,
    rows: &BTreeSet<RowId>,
    agg: &AggregateSpec,
) -> Result<Aggregated, AggregateError> {
    if rows.is_empty() {
        return Err(AggregateError::RequiresSelection);
    }
    let schema = data.schema();
    let group_field = schema
        .field(&agg.group_by)
        .ok_or_else(|| AggregateError::Spec(format!("unknown group-by field `{}`", agg.group_by)))?;
    let measure_field = schema
        .field(&agg.measure)
        .ok_or_else(|| AggregateError::Spec(format!("unknown measure field `{}`", agg.measure)))?;
    if agg.op != AggOp::Count && measure_field.field_type != FieldType::Quantitative {
        return Err(AggregateError::Spec(format!(
            "{} needs a quantitative measure, `{}` is {}",
            agg.op, agg.measure, measure_field.field_type
        )));
    }
    let gc = schema.index_of(&agg.group_by).unwrap_or_default();
    let mc = schema.index_of(&agg.measure).unwrap_or_default();

    // (label, member rows) in output order.
    let mut members: Vec<(String, Vec<RowId>)> = Vec::new();
    if group_field.field_type.is_numeric() {
        let keys: Vec<f64> = rows
            .iter()
            .map(|&r| data.value(r, gc).as_f64().unwrap_or(f64::NAN))
            .collect();
        let bins = nice_bins(&keys, agg.target_bins)?;
        let mut per_bin: Vec<Vec<RowId>> = vec![Vec::new(); bins.len()];
        for (&r, &k) in rows.iter().zip(&keys) {
            let i = bin_index(&bins, k).ok_or(AggregateError::EmptyValues)?;
            per_bin[i].push(r);
        }
        members.extend(
            bins.iter()
                .zip(per_bin)
                .filter(|(_, rs)| !rs.is_empty())
                .map(|(b, rs)| (bin_label(b, group_field.field_type), rs)),
        );
    } else {
        let mut index: HashMap<String, usize> = HashMap::new();
        for &r in rows {
            let key = data.value(r, gc).key();
            let i = *index.entry(key.clone()).or_insert_with(|| {
                members.push((key, Vec::new()));
                members.len() - 1
            });
            members[i].1.push(r);
        }
    }

    let groups: Vec<Group> = members
        .into_iter()
        .map(|(label, rs)| {
            let values: Vec<f64> = rs
                .iter()
                .map(|&r| data.value(r, mc).as_f64().unwrap_or(0.0))
                .collect();
            Group {
                value: agg.op.apply(&values),
                label,
                rows: rs,
            }
        })
        .collect();

    let value_field = agg.value_field();
    let derived_schema = Schema::new(vec![
        Field::new(agg.group_by.clone(), FieldType::Nominal),
        Field::new(value_field.clone(), FieldType::Quantitative),
    ]);
    let derived_rows = groups
        .iter()
        .map(|g| vec![Value::Text(g.label.clone()), Value::Number(g.value)])
        .collect();
    let data = Dataset::new(derived_schema, derived_rows).map_err(|e| AggregateError::Spec(e.to_string()))?;
    let spec = ChartSpec {
        chart_type: ChartType::Bar,
        encoding: Encodings {
            x: Encoding::new(agg.group_by.clone(), FieldType::Nominal),
            y: Encoding::new(value_field, FieldType::Quantitative),
            color: None,
        },
        width: base.width,
        height: base.height,
        margins: base.margins,
    };
    Ok(Aggregated { groups, data, spec })
}

/// Aggregates the selection and returns the derived dataset and chart plus the
/// view state that shows it.
pub fn aggregate_selection(
    data: &Dataset,
    spec: &ChartSpec,
    selection: &Selection,
    agg: &AggregateSpec,
) -> Result<(Dataset, ChartSpec, ViewState), AggregateError> {
    if selection.is_empty() {
        return Err(AggregateError::RequiresSelection);
    }
    let out = aggregate_rows(data, spec, selection.row_ids(), agg)?;
    let mut view = ViewState::all_visible(out.data.len());
    view.aggregate = Some(AggregateView {
        spec: agg.clone(),
        base_selection: selection.row_ids().clone(),
    });
    Ok((out.data, out.spec, view))
}
