//! Declaration of every decision variable and the lookup tables that index them.

use super::pwl::{compute_breakpoints, PwlBreakpoints};
use crate::instance::PlanningInstance;
use crate::milp::{MilpError, MilpModel, VarId, VarKind};
use std::f64::consts::PI;

/// One handle per hour, indexed by `t − 1`.
pub type Hourly = Vec<VarId>;

#[derive(Debug, Clone, PartialEq)]
pub struct GasVars {
    /// `P_{i,t}` per gas source.
    pub source: Vec<Hourly>,
    /// `f^{gas}_{p,t}` per pipeline.
    pub flow: Vec<Hourly>,
    /// `I_{m,t} = π²` per node.
    pub pressure_sq: Vec<Hourly>,
    /// `δ_{p,t,k}`, indexed `[p][t−1][k]`.
    pub fill: Vec<Vec<Vec<VarId>>>,
    /// `φ_{p,t,k}` for `k < K`, indexed `[p][t−1][k]`.
    pub open: Vec<Vec<Vec<VarId>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElectricVars {
    pub angle: Vec<Hourly>,
    pub line_flow: Vec<Hourly>,
    /// Gross output `P_{j,t}`.
    pub output: Vec<Hourly>,
    pub on: Vec<Hourly>,
    pub startup: Vec<Hourly>,
    pub shutdown: Vec<Hourly>,
    /// `Q^{EMI}_{j,t}` for every generator.
    pub emission: Vec<Hourly>,
}

/// Coupling variables of one carbon-capture plant.
#[derive(Debug, Clone, PartialEq)]
pub struct CcppVars {
    pub generator: usize,
    /// Power delivered to the grid, `P^{CCPP}`.
    pub net_output: Hourly,
    pub ptg_power: Hourly,
    pub capture_power: Hourly,
    pub captured: Hourly,
    pub stored: Hourly,
    pub utilized: Hourly,
    /// Methane produced, Mm³/h.
    pub methane: Hourly,
}

/// Operation (second-stage) variables of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct OperationVars {
    /// Name prefix, empty for single-scenario models.
    pub prefix: String,
    pub gas: GasVars,
    pub electric: ElectricVars,
    /// Empty when the model has no CCUS.
    pub ccpp: Vec<CcppVars>,
    /// `V^{CH₄}_{m,j,t}` per siting candidate.
    pub injection: Vec<Hourly>,
}

impl OperationVars {
    pub fn has_ccus(&self) -> bool {
        !self.ccpp.is_empty()
    }

    pub fn ccpp_for(&self, generator: usize) -> Option<&CcppVars> {
        self.ccpp.iter().find(|c| c.generator == generator)
    }
}

/// Investment (first-stage) variables shared by every scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstStageVars {
    /// `(generator index, y_j)` per carbon-capture plant.
    pub modules: Vec<(usize, VarId)>,
    /// Upper bound on `y_j`, aligned with `modules`.
    pub module_cap: Vec<u32>,
    /// `s_{m,j}` aligned with the instance's siting candidates.
    pub siting: Vec<VarId>,
}

impl FirstStageVars {
    pub fn modules_of(&self, generator: usize) -> Option<(VarId, u32)> {
        self.modules
            .iter()
            .zip(&self.module_cap)
            .find(|((g, _), _)| *g == generator)
            .map(|(&(_, v), &cap)| (v, cap))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableMap {
    pub breakpoints: Vec<PwlBreakpoints>,
    pub first_stage: Option<FirstStageVars>,
    pub scenarios: Vec<OperationVars>,
}

impl VariableMap {
    pub fn new(instance: &PlanningInstance) -> Self {
        Self {
            breakpoints: instance
                .gas_pipelines
                .iter()
                .map(|p| compute_breakpoints(p, instance.pwl_segments))
                .collect(),
            first_stage: None,
            scenarios: Vec::new(),
        }
    }

    /// Every handle registered in the map.
    pub fn all_handles(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        if let Some(fs) = &self.first_stage {
            out.extend(fs.modules.iter().map(|&(_, v)| v));
            out.extend(&fs.siting);
        }
        for sc in &self.scenarios {
            out.extend(sc.handles());
        }
        out
    }
}

impl OperationVars {
    /// Every operation handle of this scenario.
    pub fn handles(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        let hourly = self
            .gas
            .source
            .iter()
            .chain(&self.gas.flow)
            .chain(&self.gas.pressure_sq)
            .chain(&self.electric.angle)
            .chain(&self.electric.line_flow)
            .chain(&self.electric.output)
            .chain(&self.electric.on)
            .chain(&self.electric.startup)
            .chain(&self.electric.shutdown)
            .chain(&self.electric.emission)
            .chain(&self.injection);
        for h in hourly {
            out.extend(h);
        }
        for per_t in self.gas.fill.iter().chain(&self.gas.open) {
            for ks in per_t {
                out.extend(ks);
            }
        }
        for c in &self.ccpp {
            for h in [
                &c.net_output,
                &c.ptg_power,
                &c.capture_power,
                &c.captured,
                &c.stored,
                &c.utilized,
                &c.methane,
            ] {
                out.extend(h);
            }
        }
        out
    }
}

/// Default module cap: host plant capacity over module size.
pub fn default_module_cap(instance: &PlanningInstance, generator: usize) -> u32 {
    let module = instance
        .ptg_technology
        .as_ref()
        .map_or(1.0, |t| t.module_size);
    (instance.generators[generator].output_max / module + 1e-9).floor() as u32
}

/// Declares `y_j` for every carbon-capture plant and `s_{m,j}` for every
/// siting candidate.
pub fn declare_first_stage(
    model: &mut MilpModel,
    instance: &PlanningInstance,
    module_cap: Option<u32>,
) -> Result<FirstStageVars, MilpError> {
    let mut modules = Vec::new();
    let mut caps = Vec::new();
    for j in instance.ccpp_indices() {
        let cap = module_cap.unwrap_or_else(|| default_module_cap(instance, j));
        let id = &instance.generators[j].id;
        modules.push((j, model.add_variable(format!("y[{id}]"), VarKind::Integer, 0.0, cap as f64)?));
        caps.push(cap);
    }
    let siting = instance
        .siting_candidates
        .iter()
        .map(|c| model.add_variable(format!("s[{},{}]", c.gas_node, c.plant), VarKind::Binary, 0.0, 1.0))
        .collect::<Result<_, _>>()?;
    Ok(FirstStageVars {
        modules,
        module_cap: caps,
        siting,
    })
}

struct Namer<'a> {
    model: &'a mut MilpModel,
    prefix: &'a str,
    horizon: usize,
}

impl Namer<'_> {
    fn hourly(&mut self, symbol: &str, index: &str, kind: VarKind, lo: f64, hi: f64) -> Result<Hourly, MilpError> {
        (1..=self.horizon)
            .map(|t| {
                self.model
                    .add_variable(format!("{}{symbol}[{index},t{t}]", self.prefix), kind, lo, hi)
            })
            .collect()
    }
}

/// Declares one scenario's operation variables. `first_stage` is required
/// for the CCUS variables; without it the scenario models the plant as is.
pub fn declare_operation(
    model: &mut MilpModel,
    instance: &PlanningInstance,
    map: &VariableMap,
    prefix: &str,
    first_stage: Option<&FirstStageVars>,
) -> Result<OperationVars, MilpError> {
    let horizon = instance.horizon;
    let mut n = Namer { model, prefix, horizon };
    let inf = f64::INFINITY;
    let c = VarKind::Continuous;
    let b = VarKind::Binary;

    let source = instance
        .gas_sources
        .iter()
        .map(|s| n.hourly("Pgs", &s.id, c, s.output_min, s.output_max))
        .collect::<Result<Vec<_>, _>>()?;
    let flow = instance
        .gas_pipelines
        .iter()
        .map(|p| n.hourly("fgas", &p.id, c, p.flow_min, p.flow_max))
        .collect::<Result<Vec<_>, _>>()?;
    let pressure_sq = instance
        .gas_nodes
        .iter()
        .map(|m| n.hourly("I", &m.id, c, m.pressure_min.powi(2), m.pressure_max.powi(2)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut fill = Vec::new();
    let mut open = Vec::new();
    for (p, bp) in instance.gas_pipelines.iter().zip(&map.breakpoints) {
        let segs = bp.segments();
        let mut fill_p = Vec::with_capacity(horizon);
        let mut open_p = Vec::with_capacity(horizon);
        for t in 1..=horizon {
            let d = (1..=segs)
                .map(|k| n.model.add_variable(format!("{prefix}delta[{},t{t},k{k}]", p.id), c, 0.0, 1.0))
                .collect::<Result<Vec<_>, _>>()?;
            let o = (1..segs)
                .map(|k| n.model.add_variable(format!("{prefix}phi[{},t{t},k{k}]", p.id), b, 0.0, 1.0))
                .collect::<Result<Vec<_>, _>>()?;
            fill_p.push(d);
            open_p.push(o);
        }
        fill.push(fill_p);
        open.push(open_p);
    }
    let gas = GasVars {
        source,
        flow,
        pressure_sq,
        fill,
        open,
    };

    let angle = instance
        .buses
        .iter()
        .map(|bus| n.hourly("theta", &bus.id, c, -PI, PI))
        .collect::<Result<Vec<_>, _>>()?;
    let line_flow = instance
        .lines
        .iter()
        .map(|l| n.hourly("fele", &l.id, c, -l.capacity, l.capacity))
        .collect::<Result<Vec<_>, _>>()?;
    let mut output = Vec::new();
    let mut on = Vec::new();
    let mut startup = Vec::new();
    let mut shutdown = Vec::new();
    let mut emission = Vec::new();
    for g in &instance.generators {
        output.push(n.hourly("P", &g.id, c, 0.0, g.output_max)?);
        on.push(n.hourly("u", &g.id, b, 0.0, 1.0)?);
        startup.push(n.hourly("v", &g.id, b, 0.0, 1.0)?);
        shutdown.push(n.hourly("w", &g.id, b, 0.0, 1.0)?);
        emission.push(n.hourly("Qemi", &g.id, c, 0.0, inf)?);
    }
    let electric = ElectricVars {
        angle,
        line_flow,
        output,
        on,
        startup,
        shutdown,
        emission,
    };

    let mut ccpp = Vec::new();
    let mut injection = Vec::new();
    if let (Some(fs), Some(tech)) = (first_stage, instance.ptg_technology.as_ref()) {
        for (&(j, _), &cap) in fs.modules.iter().zip(&fs.module_cap) {
            let g = &instance.generators[j];
            let ptg_max = tech.per_module_output_max * cap as f64;
            ccpp.push(CcppVars {
                generator: j,
                net_output: n.hourly("Pccpp", &g.id, c, 0.0, g.output_max)?,
                ptg_power: n.hourly("Pptg", &g.id, c, 0.0, ptg_max)?,
                capture_power: n.hourly("Pcc", &g.id, c, 0.0, g.output_max)?,
                captured: n.hourly("Qcc", &g.id, c, 0.0, inf)?,
                stored: n.hourly("Qcs", &g.id, c, 0.0, inf)?,
                utilized: n.hourly("Qcu", &g.id, c, 0.0, inf)?,
                methane: n.hourly("Vch4", &g.id, c, 0.0, inf)?,
            });
        }
        for cand in &instance.siting_candidates {
            let index = format!("{},{}", cand.gas_node, cand.plant);
            injection.push(n.hourly("Vsite", &index, c, 0.0, inf)?);
        }
    }
    Ok(OperationVars {
        prefix: prefix.to_string(),
        gas,
        electric,
        ccpp,
        injection,
    })
}
