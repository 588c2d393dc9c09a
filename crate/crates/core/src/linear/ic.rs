//! Infinitesimals that vanish at the initial-condition point, built from
//! flat bump factors.

pub struct IcCompatibleInfinitesimals {
    pub f0: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub g0: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub gamma_f: f64,
    pub gamma_g: f64,
    pub x0: f64,
    pub y0_1: f64,
}

fn flat(gamma: f64, d: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else {
        (-(gamma * gamma) / (d * d)).exp()
    }
}

impl IcCompatibleInfinitesimals {
    /// `(ξ, η₁) = (f₀·e^{−γ_f²/(x−x₀)²}, g₀·e^{−γ_g²/(y₁−y₀₁)²})`, with the
    /// limit 0 at the removable singularities.
    pub fn eval(&self, x: f64, y1: f64) -> (f64, f64) {
        let bx = flat(self.gamma_f, x - self.x0);
        let by = flat(self.gamma_g, y1 - self.y0_1);
        let xi = if bx == 0.0 { 0.0 } else { (self.f0)(x, y1) * bx };
        let eta = if by == 0.0 { 0.0 } else { (self.g0)(x, y1) * by };
        (xi, eta)
    }
}
