use serde::Serialize;

use super::ChartError;
use crate::data::{FieldType, Value};
use crate::snapshot::Canon;

/// Fraction of the data span added on each side of an automatic domain.
pub const DOMAIN_PADDING: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Domain {
    Numeric { min: f64, max: f64 },
    Band { categories: Vec<String> },
}

impl Domain {
    pub fn canon(&self) -> Canon {
        match self {
            Domain::Numeric { min, max } => Canon::obj([
                ("kind", Canon::str("numeric")),
                ("max", Canon::Num(*max)),
                ("min", Canon::Num(*min)),
            ]),
            Domain::Band { categories } => Canon::obj([
                ("categories", Canon::Arr(categories.iter().map(Canon::str).collect())),
                ("kind", Canon::str("band")),
            ]),
        }
    }

    pub fn numeric(&self) -> Option<(f64, f64)> {
        match self {
            Domain::Numeric { min, max } => Some((*min, *max)),
            Domain::Band { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum ScaleKind {
    Linear,
    Band,
    Time,
}

impl ScaleKind {
    pub fn for_field(field_type: FieldType) -> Self {
        match field_type {
            FieldType::Nominal => ScaleKind::Band,
            FieldType::Quantitative => ScaleKind::Linear,
            FieldType::Temporal => ScaleKind::Time,
        }
    }
}

/// Maps data values to dip along one axis. The range may be reversed (y axes
/// run from the plot bottom to the top).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scale {
    pub kind: ScaleKind,
    pub domain: Domain,
    pub range: (f64, f64),
}

impl Scale {
    pub fn new(kind: ScaleKind, domain: Domain, range: (f64, f64)) -> Result<Self, ChartError> {
        match (&kind, &domain) {
            (ScaleKind::Band, Domain::Band { categories }) => {
                if categories.is_empty() {
                    return Err(ChartError::EmptyDomain);
                }
            }
            (ScaleKind::Linear | ScaleKind::Time, Domain::Numeric { min, max }) => {
                if !(min.is_finite() && max.is_finite() && min < max) {
                    return Err(ChartError::Spec(format!("invalid numeric domain [{min}, {max}]")));
                }
            }
            _ => {
                return Err(ChartError::Spec(format!(
                    "domain kind does not match {kind:?} scale"
                )))
            }
        }
        Ok(Self { kind, domain, range })
    }

    /// Position of a numeric value; `None` for band scales.
    pub fn apply(&self, v: f64) -> Option<f64> {
        let (min, max) = self.domain.numeric()?;
        let (r0, r1) = self.range;
        Some(r0 + (v - min) / (max - min) * (r1 - r0))
    }

    /// Inverse of [`Scale::apply`].
    pub fn invert(&self, px: f64) -> Option<f64> {
        let (min, max) = self.domain.numeric()?;
        let (r0, r1) = self.range;
        Some(min + (px - r0) / (r1 - r0) * (max - min))
    }

    pub fn band_index(&self, category: &str) -> Option<usize> {
        match &self.domain {
            Domain::Band { categories } => categories.iter().position(|c| c == category),
            Domain::Numeric { .. } => None,
        }
    }

    pub fn band_width(&self) -> Option<f64> {
        match &self.domain {
            Domain::Band { categories } => Some((self.range.1 - self.range.0) / categories.len() as f64),
            Domain::Numeric { .. } => None,
        }
    }

    /// Start and end (in range order) of a category's band.
    pub fn band(&self, category: &str) -> Option<(f64, f64)> {
        let i = self.band_index(category)?;
        let w = self.band_width()?;
        let start = self.range.0 + w * i as f64;
        Some((start, start + w))
    }

    /// Position of any value: numeric values through the linear map, others
    /// at the center of their band.
    pub fn position(&self, value: &Value) -> Option<f64> {
        match (self.kind, value) {
            (ScaleKind::Band, v) => self.band(&v.key()).map(|(a, b)| (a + b) / 2.0),
            (_, v) => self.apply(v.as_f64()?),
        }
    }
}

/// `[min, max]` padded by [`DOMAIN_PADDING`] of the span on each side; a zero
/// span is padded by `max(|v| * 0.05, 1)`.
pub fn padded_extent(values: impl IntoIterator<Item = f64>) -> Option<(f64, f64)> {
    let mut iter = values.into_iter();
    let first = iter.next()?;
    let (min, max) = iter.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let pad = if max > min {
        DOMAIN_PADDING * (max - min)
    } else {
        (min.abs() * DOMAIN_PADDING).max(1.0)
    };
    Some((min - pad, max + pad))
}

/// Distinct category keys in first-appearance order.
pub fn band_categories<'a>(values: impl IntoIterator<Item = &'a Value>) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for v in values {
        let key = v.key();
        if seen.insert(key.clone()) {
            out.push(key);
        }
    }
    out
}

/// Builds the automatic scale for an encoding over `values`.
pub fn compute_scale(field_type: FieldType, values: &[Value], range: (f64, f64)) -> Result<Scale, ChartError> {
    if values.is_empty() {
        return Err(ChartError::EmptyDomain);
    }
    let kind = ScaleKind::for_field(field_type);
    let domain = match kind {
        ScaleKind::Band => Domain::Band {
            categories: band_categories(values),
        },
        ScaleKind::Linear | ScaleKind::Time => {
            let nums = values
                .iter()
                .map(|v| {
                    v.as_f64()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| ChartError::Spec(format!("non-numeric value {v} on a {kind:?} scale")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let (min, max) = padded_extent(nums).ok_or(ChartError::EmptyDomain)?;
            Domain::Numeric { min, max }
        }
    };
    Scale::new(kind, domain, range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nums(v: &[f64]) -> Vec<Value> {
        v.iter().map(|x| Value::Number(*x)).collect()
    }

    #[test]
    fn padded_linear_domain() {
        let s = compute_scale(FieldType::Quantitative, &nums(&[2.0, 10.0, 7.0]), (0.0, 100.0)).unwrap();
        let (min, max) = s.domain.numeric().unwrap();
        assert!((min - 1.6).abs() < 1e-12 && (max - 10.4).abs() < 1e-12);
    }

    #[test]
    fn degenerate_span() {
        let s = compute_scale(FieldType::Quantitative, &nums(&[5.0, 5.0]), (0.0, 100.0)).unwrap();
        assert_eq!(s.domain.numeric(), Some((4.0, 6.0)));
        let s = compute_scale(FieldType::Quantitative, &nums(&[100.0]), (0.0, 1.0)).unwrap();
        assert_eq!(s.domain.numeric(), Some((95.0, 105.0)));
    }

    #[test]
    fn band_first_appearance() {
        let vals: Vec<Value> = ["CA", "TX", "CA", "NY"].iter().map(|s| Value::Text(s.to_string())).collect();
        let s = compute_scale(FieldType::Nominal, &vals, (0.0, 90.0)).unwrap();
        assert_eq!(
            s.domain,
            Domain::Band {
                categories: vec!["CA".into(), "TX".into(), "NY".into()]
            }
        );
        assert_eq!(s.band("TX"), Some((30.0, 60.0)));
        assert_eq!(s.position(&Value::Text("NY".into())), Some(75.0));
    }

    #[test]
    fn empty_values() {
        assert!(matches!(
            compute_scale(FieldType::Quantitative, &[], (0.0, 1.0)),
            Err(ChartError::EmptyDomain)
        ));
    }

    #[test]
    fn kind_domain_mismatch_rejected() {
        assert!(Scale::new(ScaleKind::Band, Domain::Numeric { min: 0.0, max: 1.0 }, (0.0, 1.0)).is_err());
        assert!(Scale::new(ScaleKind::Linear, Domain::Numeric { min: 1.0, max: 1.0 }, (0.0, 1.0)).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(a in -1e6f64..1e6, b in -1e6f64..1e6, t in 0.0f64..1.0, flip in any::<bool>()) {
            let s = compute_scale(FieldType::Quantitative, &nums(&[a, b]), if flip { (360.0, 0.0) } else { (0.0, 280.0) }).unwrap();
            let (min, max) = s.domain.numeric().unwrap();
            let v = min + t * (max - min);
            let back = s.invert(s.apply(v).unwrap()).unwrap();
            prop_assert!((back - v).abs() <= 1e-9 * v.abs().max(max.abs()).max(1.0));
        }

        #[test]
        fn strictly_monotone(a in -1e3f64..1e3, d in 1e-3f64..1e3) {
            let s = compute_scale(FieldType::Quantitative, &nums(&[a, a + d]), (0.0, 100.0)).unwrap();
            prop_assert!(s.apply(a).unwrap() < s.apply(a + d).unwrap());
        }
    }
}
