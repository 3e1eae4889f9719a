//! Maximization-space image of the raw objectives used for surrogate
//! modelling: logit of accuracy, negated logit of |SPD| and `-ln(epsilon)`.

/// Accuracy and |SPD| are clamped to `[BOUNDARY_CLAMP, 1 - BOUNDARY_CLAMP]`.
pub const BOUNDARY_CLAMP: f64 = 1e-6;
pub const EPSILON_FLOOR: f64 = 1e-6;
/// Reported epsilon of non-private runs.
pub const EPSILON_CAP: f64 = 1e6;

fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        return BOUNDARY_CLAMP;
    }
    x.clamp(BOUNDARY_CLAMP, 1.0 - BOUNDARY_CLAMP)
}

pub fn utility_transform(accuracy: f64) -> f64 {
    let a = clamp_unit(accuracy);
    a.ln() - (-a).ln_1p()
}

pub fn fairness_transform(spd: f64) -> f64 {
    let s = clamp_unit(spd.abs());
    (-s).ln_1p() - s.ln()
}

pub fn privacy_transform(epsilon: f64) -> f64 {
    let e = if epsilon.is_nan() {
        EPSILON_CAP
    } else {
        epsilon.clamp(EPSILON_FLOOR, EPSILON_CAP)
    };
    -e.ln()
}

/// `(accuracy, |SPD|, epsilon) -> (utility, fairness, privacy)`, all to be maximized.
pub fn objective_transform(accuracy: f64, spd: f64, epsilon: f64) -> [f64; 3] {
    [
        utility_transform(accuracy),
        fairness_transform(spd),
        privacy_transform(epsilon),
    ]
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Raw `(accuracy, |SPD|, epsilon)` from a transformed triple.
pub fn inverse_transform(t: [f64; 3]) -> (f64, f64, f64) {
    (sigmoid(t[0]), sigmoid(-t[1]), (-t[2]).exp())
}
