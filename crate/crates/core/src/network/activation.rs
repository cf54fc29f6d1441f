use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationKind {
    Tanh,
    /// `(1 - alpha) * tanh(z) + alpha * exp(-z^2)`: a sigmoid-like ramp at
    /// `alpha = 0`, a Gaussian bump at `alpha = 1`.
    Blend,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivationSpec {
    pub kind: ActivationKind,
    /// Mixing weight of the Gaussian term; ignored for `Tanh`.
    #[serde(default)]
    pub alpha: f64,
    /// Whether training updates `alpha`.
    #[serde(default)]
    pub trainable: bool,
}

impl ActivationSpec {
    pub const fn tanh() -> Self {
        ActivationSpec {
            kind: ActivationKind::Tanh,
            alpha: 0.0,
            trainable: false,
        }
    }

    pub const fn blend(alpha: f64, trainable: bool) -> Self {
        ActivationSpec {
            kind: ActivationKind::Blend,
            alpha,
            trainable,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::domain(format!(
                "blend alpha {} outside [0, 1]",
                self.alpha
            )));
        }
        Ok(())
    }

    /// True when training should update `alpha`.
    pub fn learns_alpha(&self) -> bool {
        self.kind == ActivationKind::Blend && self.trainable
    }
}

#[inline]
pub fn act(spec: &ActivationSpec, z: f64) -> f64 {
    match spec.kind {
        ActivationKind::Tanh => z.tanh(),
        ActivationKind::Blend => (1.0 - spec.alpha) * z.tanh() + spec.alpha * (-z * z).exp(),
    }
}

/// Derivative of [`act`] with respect to `z`.
#[inline]
pub fn act_deriv(spec: &ActivationSpec, z: f64) -> f64 {
    let t = z.tanh();
    match spec.kind {
        ActivationKind::Tanh => 1.0 - t * t,
        ActivationKind::Blend => {
            (1.0 - spec.alpha) * (1.0 - t * t) + spec.alpha * (-2.0 * z * (-z * z).exp())
        }
    }
}

/// Derivative of the blend activation with respect to `alpha`.
#[inline]
pub fn act_alpha_deriv(z: f64) -> f64 {
    (-z * z).exp() - z.tanh()
}
