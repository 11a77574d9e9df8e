use super::PlanningError;
use serde::{Deserialize, Serialize};

/// One realization of (carbon tax, carbon price) with its weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub tax: f64,
    pub price: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum UncertaintySpec {
    /// Cartesian grid; `probabilities` is tax-major (`tax_points.len() ×
    /// price_points.len()` cells).
    ScenarioGrid {
        tax_points: Vec<f64>,
        price_points: Vec<f64>,
        probabilities: Vec<f64>,
    },
    Box {
        tax_range: (f64, f64),
        price_range: (f64, f64),
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RobustMethod {
    #[default]
    Corner,
    VertexEpigraph,
}

impl std::str::FromStr for RobustMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "corner" => Ok(RobustMethod::Corner),
            "vertex-epigraph" | "vertex_epigraph" => Ok(RobustMethod::VertexEpigraph),
            other => Err(format!("unknown robust method `{other}`")),
        }
    }
}

pub const TAX_RANGE: (f64, f64) = (1.0, 120.0);
pub const PRICE_RANGE: (f64, f64) = (1.0, 80.0);

/// `n` evenly spaced points including both endpoints.
pub fn even_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

impl UncertaintySpec {
    /// Equal-probability grid of `n_tax × n_price` evenly spaced points.
    pub fn even_grid(n_tax: usize, n_price: usize, tax_range: (f64, f64), price_range: (f64, f64)) -> Self {
        let cells = n_tax * n_price;
        UncertaintySpec::ScenarioGrid {
            tax_points: even_points(tax_range.0, tax_range.1, n_tax),
            price_points: even_points(price_range.0, price_range.1, n_price),
            probabilities: vec![1.0 / cells as f64; cells],
        }
    }

    /// The default 5×5 grid over tax ∈ [1,120], price ∈ [1,80].
    pub fn default_grid() -> Self {
        Self::even_grid(5, 5, TAX_RANGE, PRICE_RANGE)
    }

    pub fn default_box() -> Self {
        UncertaintySpec::Box {
            tax_range: TAX_RANGE,
            price_range: PRICE_RANGE,
        }
    }

    pub fn single(tax: f64, price: f64) -> Self {
        UncertaintySpec::ScenarioGrid {
            tax_points: vec![tax],
            price_points: vec![price],
            probabilities: vec![1.0],
        }
    }

    pub fn validate(&self) -> Result<(), PlanningError> {
        let bad = |m: &str| Err(PlanningError::InvalidSpec(m.to_string()));
        match self {
            UncertaintySpec::ScenarioGrid {
                tax_points,
                price_points,
                probabilities,
            } => {
                if tax_points.is_empty() || price_points.is_empty() {
                    return bad("grid axes must be nonempty");
                }
                if probabilities.len() != tax_points.len() * price_points.len() {
                    return bad("one probability per grid cell is required");
                }
                let all = tax_points.iter().chain(price_points).chain(probabilities);
                if all.clone().any(|x| !x.is_finite()) {
                    return bad("grid values must be finite");
                }
                if tax_points.iter().chain(price_points).any(|&x| x < 0.0) {
                    return bad("tax and price points must be nonnegative");
                }
                if probabilities.iter().any(|&p| p < 0.0) {
                    return bad("probabilities must be nonnegative");
                }
                let sum: f64 = probabilities.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return bad("probabilities must sum to 1");
                }
                Ok(())
            }
            UncertaintySpec::Box { tax_range, price_range } => {
                for (lo, hi) in [tax_range, price_range] {
                    if !(lo.is_finite() && hi.is_finite()) || lo > hi || *lo < 0.0 {
                        return bad("box ranges need 0 <= lo <= hi");
                    }
                }
                Ok(())
            }
        }
    }

    /// Grid cells (tax-major) or distinct box vertices (equal weights).
    pub fn scenarios(&self) -> Vec<Scenario> {
        match self {
            UncertaintySpec::ScenarioGrid {
                tax_points,
                price_points,
                probabilities,
            } => {
                let mut out = Vec::new();
                for (a, &tax) in tax_points.iter().enumerate() {
                    for (b, &price) in price_points.iter().enumerate() {
                        out.push(Scenario {
                            tax,
                            price,
                            probability: probabilities[a * price_points.len() + b],
                        });
                    }
                }
                out
            }
            UncertaintySpec::Box { tax_range, price_range } => {
                let mut verts: Vec<(f64, f64)> = Vec::new();
                for tax in [tax_range.0, tax_range.1] {
                    for price in [price_range.0, price_range.1] {
                        if !verts.contains(&(tax, price)) {
                            verts.push((tax, price));
                        }
                    }
                }
                let p = 1.0 / verts.len() as f64;
                verts
                    .into_iter()
                    .map(|(tax, price)| Scenario {
                        tax,
                        price,
                        probability: p,
                    })
                    .collect()
            }
        }
    }

    /// Probability-weighted mean (tax, price).
    pub fn mean(&self) -> (f64, f64) {
        self.scenarios()
            .iter()
            .fold((0.0, 0.0), |(t, p), s| (t + s.probability * s.tax, p + s.probability * s.price))
    }

    /// Human-readable description of point placement.
    pub fn spacing_note(&self) -> String {
        match self {
            UncertaintySpec::ScenarioGrid {
                tax_points,
                price_points,
                ..
            } => format!(
                "grid {}x{}: tax {:?}, price {:?}",
                tax_points.len(),
                price_points.len(),
                tax_points,
                price_points
            ),
            UncertaintySpec::Box { tax_range, price_range } => format!(
                "box vertices of tax [{}, {}] x price [{}, {}]",
                tax_range.0, tax_range.1, price_range.0, price_range.1
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_25_equal_cells() {
        let g = UncertaintySpec::default_grid();
        g.validate().unwrap();
        let s = g.scenarios();
        assert_eq!(s.len(), 25);
        assert!(s.iter().all(|c| (c.probability - 0.04).abs() < 1e-15));
        assert_eq!(s[0].tax, 1.0);
        assert_eq!(s[24].tax, 120.0);
        assert_eq!(s[24].price, 80.0);
        let (t, p) = g.mean();
        assert!((t - 60.5).abs() < 1e-9 && (p - 40.5).abs() < 1e-9);
    }

    #[test]
    fn box_vertices_deduplicate() {
        let b = UncertaintySpec::Box {
            tax_range: (50.0, 50.0),
            price_range: (40.0, 40.0),
        };
        assert_eq!(b.scenarios().len(), 1);
        assert_eq!(UncertaintySpec::default_box().scenarios().len(), 4);
    }

    #[test]
    fn invalid_specs() {
        let g = UncertaintySpec::ScenarioGrid {
            tax_points: vec![1.0, 2.0],
            price_points: vec![1.0],
            probabilities: vec![0.7, 0.7],
        };
        assert!(g.validate().is_err());
        let b = UncertaintySpec::Box {
            tax_range: (5.0, 1.0),
            price_range: (0.0, 1.0),
        };
        assert!(b.validate().is_err());
    }
}
