//! Declarative gauge descriptions shared by the CLI and instance files:
//!
//! ```json
//! { "kind": "linear_cone", "dim": 2,
//!   "params": { "c": [1, 1], "cone": { "type": "orthant" } } }
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GaugeError, Result};
use crate::gauge::{
    Cone, ConeIndicator, LinearConeGauge, Norm, NormGauge, ScaledGauge, SharedGauge,
    ZeroIndicator,
};
use crate::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescriptorKind {
    L1,
    L2,
    Linf,
    LinearCone,
    ConeIndicator,
    Zero,
    Scaled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeDescriptor {
    pub kind: DescriptorKind,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConeDescriptor {
    Orthant,
    Halfspace { normal: Vec<f64> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearConeParams {
    c: Vec<f64>,
    cone: ConeDescriptor,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConeParams {
    cone: ConeDescriptor,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScaledParams {
    factor: f64,
    base: GaugeDescriptor,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

fn params<T: for<'de> Deserialize<'de>>(kind: DescriptorKind, value: &serde_json::Value) -> Result<T> {
    let value = if value.is_null() {
        serde_json::Value::Object(Default::default())
    } else {
        value.clone()
    };
    serde_json::from_value(value)
        .map_err(|e| GaugeError::InvalidInput(format!("bad params for {kind:?}: {e}")))
}

impl ConeDescriptor {
    pub fn build(&self, dim: usize) -> Result<Cone> {
        match self {
            ConeDescriptor::Orthant => Ok(Cone::NonnegativeOrthant),
            ConeDescriptor::Halfspace { normal } => {
                if normal.len() != dim {
                    return Err(GaugeError::DimensionMismatch {
                        expected: dim,
                        got: normal.len(),
                    });
                }
                Cone::halfspace(Vector::from_column_slice(normal))
            }
        }
    }
}

impl GaugeDescriptor {
    pub fn norm(norm: Norm, dim: usize) -> Self {
        let kind = match norm {
            Norm::L1 => DescriptorKind::L1,
            Norm::L2 => DescriptorKind::L2,
            Norm::Linf => DescriptorKind::Linf,
        };
        GaugeDescriptor {
            kind,
            dim,
            params: serde_json::Value::Null,
        }
    }

    pub fn zero(dim: usize) -> Self {
        GaugeDescriptor {
            kind: DescriptorKind::Zero,
            dim,
            params: serde_json::Value::Null,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| GaugeError::InvalidInput(format!("gauge descriptor: {e}")))
    }

    pub fn build(&self) -> Result<SharedGauge> {
        if self.dim == 0 {
            return Err(GaugeError::InvalidInput("gauge dim must be >= 1".into()));
        }
        let norm = |n| -> Result<SharedGauge> {
            params::<NoParams>(self.kind, &self.params)?;
            Ok(Arc::new(NormGauge::new(n, self.dim)))
        };
        match self.kind {
            DescriptorKind::L1 => norm(Norm::L1),
            DescriptorKind::L2 => norm(Norm::L2),
            DescriptorKind::Linf => norm(Norm::Linf),
            DescriptorKind::Zero => {
                params::<NoParams>(self.kind, &self.params)?;
                Ok(Arc::new(ZeroIndicator::new(self.dim)))
            }
            DescriptorKind::LinearCone => {
                let p: LinearConeParams = params(self.kind, &self.params)?;
                if p.c.len() != self.dim {
                    return Err(GaugeError::DimensionMismatch {
                        expected: self.dim,
                        got: p.c.len(),
                    });
                }
                let cone = p.cone.build(self.dim)?;
                Ok(Arc::new(LinearConeGauge::new(
                    Vector::from_vec(p.c),
                    cone,
                )?))
            }
            DescriptorKind::ConeIndicator => {
                let p: ConeParams = params(self.kind, &self.params)?;
                Ok(Arc::new(ConeIndicator::new(p.cone.build(self.dim)?, self.dim)))
            }
            DescriptorKind::Scaled => {
                let p: ScaledParams = params(self.kind, &self.params)?;
                if !(p.factor.is_finite() && p.factor > 0.0) {
                    return Err(GaugeError::InvalidInput(
                        "scale factor must be positive".into(),
                    ));
                }
                if p.base.dim != self.dim {
                    return Err(GaugeError::DimensionMismatch {
                        expected: self.dim,
                        got: p.base.dim,
                    });
                }
                Ok(Arc::new(ScaledGauge::new(p.factor, p.base.build()?)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::GaugeKind;

    #[test]
    fn builds_catalog_norms() {
        let g = GaugeDescriptor::from_json(r#"{"kind":"linf","dim":3}"#)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(g.kind(), GaugeKind::Linf);
        assert_eq!(g.dim(), 3);
    }

    #[test]
    fn builds_linear_cone() {
        let text = r#"{"kind":"linear_cone","dim":2,
            "params":{"c":[1,1],"cone":{"type":"orthant"}}}"#;
        let g = GaugeDescriptor::from_json(text).unwrap().build().unwrap();
        assert_eq!(g.eval(&Vector::from_vec(vec![2.0, 3.0])), 5.0);
    }

    #[test]
    fn builds_scaled_halfspace_indicator() {
        let text = r#"{"kind":"scaled","dim":2,"params":{"factor":2.0,
            "base":{"kind":"cone_indicator","dim":2,
                    "params":{"cone":{"type":"halfspace","normal":[1,0]}}}}}"#;
        let g = GaugeDescriptor::from_json(text).unwrap().build().unwrap();
        assert_eq!(g.eval(&Vector::from_vec(vec![-1.0, 3.0])), 0.0);
        assert_eq!(g.eval(&Vector::from_vec(vec![1.0, 3.0])), f64::INFINITY);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_params() {
        assert!(GaugeDescriptor::from_json(r#"{"kind":"l1","dim":2,"extra":1}"#).is_err());
        let d = GaugeDescriptor::from_json(r#"{"kind":"l1","dim":2,"params":{"p":3}}"#).unwrap();
        assert!(d.build().is_err());
        let d = GaugeDescriptor::from_json(
            r#"{"kind":"linear_cone","dim":3,"params":{"c":[1,1],"cone":{"type":"orthant"}}}"#,
        )
        .unwrap();
        assert!(matches!(d.build(), Err(GaugeError::DimensionMismatch { .. })));
        assert!(GaugeDescriptor::from_json(r#"{"kind":"l7","dim":2}"#).is_err());
    }
}
