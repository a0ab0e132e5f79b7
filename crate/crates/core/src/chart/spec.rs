use serde::{Deserialize, Serialize};

use super::ChartError;
use crate::data::{Field, FieldType, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartType {
    Scatter,
    Bar,
    Multiline,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    pub field: String,
    #[serde(rename = "type")]
    pub field_type: FieldType,
}

impl Encoding {
    pub fn new(field: impl Into<String>, field_type: FieldType) -> Self {
        Self {
            field: field.into(),
            field_type,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encodings {
    pub x: Encoding,
    pub y: Encoding,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Encoding>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
    pub left: f64,
}

impl Margins {
    pub fn uniform(v: f64) -> Self {
        Self {
            top: v,
            right: v,
            bottom: v,
            left: v,
        }
    }
}

/// Declarative chart description. Geometry is in dip; the plot area occupies
/// `[0, width] x [0, height]` and the margins surround it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChartSpec {
    pub chart_type: ChartType,
    pub encoding: Encodings,
    pub width: f64,
    pub height: f64,
    pub margins: Margins,
}

impl ChartSpec {
    /// Checks the structural rules that do not depend on the data.
    pub fn validate(&self, axis_band_dip: f64) -> Result<(), ChartError> {
        let bad = |msg: String| Err(ChartError::Spec(msg));
        if !(self.width > 0.0 && self.height > 0.0) {
            return bad(format!(
                "plot size must be positive, got {}x{}",
                self.width, self.height
            ));
        }
        let m = self.margins;
        if [m.top, m.right, m.bottom, m.left]
            .iter()
            .any(|v| v.is_nan() || *v < axis_band_dip)
        {
            return bad(format!("margins must be at least the axis band width ({axis_band_dip} dip)"));
        }
        let enc = &self.encoding;
        match self.chart_type {
            ChartType::Scatter => {
                if enc.x.field_type != FieldType::Quantitative || enc.y.field_type != FieldType::Quantitative {
                    return bad("scatter requires quantitative x and y".into());
                }
            }
            ChartType::Bar => {
                if enc.x.field_type == FieldType::Quantitative {
                    return bad("bar requires nominal or temporal x".into());
                }
                if enc.y.field_type != FieldType::Quantitative {
                    return bad("bar requires quantitative y".into());
                }
            }
            ChartType::Multiline => {
                if enc.x.field_type == FieldType::Nominal || enc.y.field_type != FieldType::Quantitative {
                    return bad("multiline requires quantitative or temporal x and quantitative y".into());
                }
                if enc.color.is_none() {
                    return bad("multiline requires a color (series) encoding".into());
                }
            }
        }
        if let Some(color) = &enc.color {
            if color.field_type != FieldType::Nominal {
                return bad("color encoding must be nominal".into());
            }
        }
        Ok(())
    }

    /// Checks that every encoded field exists in `schema` with the declared type.
    pub fn validate_against(&self, schema: &Schema) -> Result<(), ChartError> {
        for enc in self.encodings() {
            match schema.field(&enc.field) {
                None => return Err(ChartError::Spec(format!("unknown field `{}`", enc.field))),
                Some(f) if f.field_type != enc.field_type => {
                    return Err(ChartError::Spec(format!(
                        "field `{}` is {} but encoded as {}",
                        enc.field, f.field_type, enc.field_type
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    pub fn encodings(&self) -> impl Iterator<Item = &Encoding> {
        [Some(&self.encoding.x), Some(&self.encoding.y), self.encoding.color.as_ref()]
            .into_iter()
            .flatten()
    }
}

/// A chart spec file: the chart description plus the schema used to load its data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecDocument {
    #[serde(flatten)]
    pub chart: ChartSpec,
    pub schema: Vec<Field>,
}

impl SpecDocument {
    pub fn parse(text: &str) -> Result<Self, ChartError> {
        serde_json::from_str(text).map_err(|e| ChartError::Spec(format!("invalid chart spec: {e}")))
    }

    pub fn schema(&self) -> Schema {
        Schema::new(self.schema.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scatter() -> ChartSpec {
        ChartSpec {
            chart_type: ChartType::Scatter,
            encoding: Encodings {
                x: Encoding::new("a", FieldType::Quantitative),
                y: Encoding::new("b", FieldType::Quantitative),
                color: None,
            },
            width: 300.0,
            height: 300.0,
            margins: Margins::uniform(48.0),
        }
    }

    #[test]
    fn chart_type_rules() {
        assert!(scatter().validate(48.0).is_ok());
        let mut bar = scatter();
        bar.chart_type = ChartType::Bar;
        assert!(bar.validate(48.0).is_err());
        bar.encoding.x.field_type = FieldType::Nominal;
        assert!(bar.validate(48.0).is_ok());
        let mut line = scatter();
        line.chart_type = ChartType::Multiline;
        assert!(line.validate(48.0).is_err());
        line.encoding.color = Some(Encoding::new("s", FieldType::Nominal));
        assert!(line.validate(48.0).is_ok());
    }

    #[test]
    fn geometry_rules() {
        let mut s = scatter();
        s.margins.left = 40.0;
        assert!(s.validate(48.0).is_err());
        let mut s = scatter();
        s.width = 0.0;
        assert!(s.validate(48.0).is_err());
    }

    #[test]
    fn schema_mismatch() {
        let schema = Schema::new(vec![
            Field::new("a", FieldType::Quantitative),
            Field::new("b", FieldType::Nominal),
        ]);
        assert!(scatter().validate_against(&schema).is_err());
    }
}
