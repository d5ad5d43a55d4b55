//! Declarative descriptions of the lifted test functions, in the same shape as
//! gauge descriptors:
//!
//! ```json
//! { "kind": "shifted_l1", "dim": 2, "params": { "c": 1.0 } }
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{SharedLifted, ShiftedL1, SmoothedL1Halfplane};
use crate::error::{GaugeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftedKind {
    ShiftedL1,
    SmoothedL1Halfplane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftedDescriptor {
    pub kind: LiftedKind,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub params: serde_json::Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftParams {
    c: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EpsParams {
    eps: f64,
}

impl LiftedDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GaugeError::InvalidInput(format!("bad function descriptor: {e}")))
    }

    pub fn build(&self) -> Result<SharedLifted> {
        let bad = |e: serde_json::Error| GaugeError::InvalidInput(format!("bad params for {:?}: {e}", self.kind));
        match self.kind {
            LiftedKind::ShiftedL1 => {
                let p: ShiftParams = serde_json::from_value(self.params.clone()).map_err(bad)?;
                Ok(Arc::new(ShiftedL1::new(p.c, self.dim)?))
            }
            LiftedKind::SmoothedL1Halfplane => {
                if self.dim != 2 {
                    return Err(GaugeError::DimensionMismatch { expected: 2, got: self.dim });
                }
                let p: EpsParams = serde_json::from_value(self.params.clone()).map_err(bad)?;
                Ok(Arc::new(SmoothedL1Halfplane::new(p.eps)?))
            }
        }
    }
}
