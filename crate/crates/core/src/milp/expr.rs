use super::VarId;

/// Linear expression `Σ c·x + constant` used while assembling rows and costs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(f64, VarId)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(coef: f64, var: VarId) -> Self {
        Self {
            terms: vec![(coef, var)],
            constant: 0.0,
        }
    }

    pub fn add(&mut self, coef: f64, var: VarId) -> &mut Self {
        self.terms.push((coef, var));
        self
    }

    pub fn add_constant(&mut self, value: f64) -> &mut Self {
        self.constant += value;
        self
    }

    /// `self += scale · other`
    pub fn add_scaled(&mut self, scale: f64, other: &LinExpr) -> &mut Self {
        self.terms
            .extend(other.terms.iter().map(|&(c, v)| (scale * c, v)));
        self.constant += scale * other.constant;
        self
    }

    pub fn scaled(&self, scale: f64) -> LinExpr {
        let mut out = LinExpr::new();
        out.add_scaled(scale, self);
        out
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|&(c, v)| c * values[v.index()])
                .sum::<f64>()
    }
}
