use super::PlanningInstance;
use std::collections::BTreeMap;

/// Sparse (row, column) → coefficient map. Absent entries are zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseIncidence {
    pub rows: usize,
    pub cols: usize,
    entries: BTreeMap<(usize, usize), i8>,
}

impl SparseIncidence {
    fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    fn set(&mut self, row: usize, col: usize, value: i8) {
        self.entries.insert((row, col), value);
    }

    pub fn get(&self, row: usize, col: usize) -> Option<i8> {
        self.entries.get(&(row, col)).copied()
    }

    /// Nonzeros of one column as (row, value).
    pub fn column(&self, col: usize) -> Vec<(usize, i8)> {
        self.entries
            .iter()
            .filter(|((_, c), _)| *c == col)
            .map(|(&(r, _), &v)| (r, v))
            .collect()
    }

    /// Nonzeros of one row as (column, value).
    pub fn row(&self, row: usize) -> Vec<(usize, i8)> {
        self.entries
            .range((row, 0)..(row + 1, 0))
            .map(|(&(_, c), &v)| (c, v))
            .collect()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }
}

/// Node/element incidence maps: `a` gas node × source, `b` gas node ×
/// pipeline (+1 start, −1 end), `c` bus × generator, `d` bus × line
/// (+1 from, −1 to).
#[derive(Debug, Clone, PartialEq)]
pub struct Incidence {
    pub a: SparseIncidence,
    pub b: SparseIncidence,
    pub c: SparseIncidence,
    pub d: SparseIncidence,
}

pub fn incidence(inst: &PlanningInstance) -> Incidence {
    let nodes = inst.gas_nodes.len();
    let buses = inst.buses.len();
    let node = |id: &str| inst.gas_node_index(id).expect("validated reference");
    let bus = |id: &str| inst.bus_index(id).expect("validated reference");

    let mut a = SparseIncidence::new(nodes, inst.gas_sources.len());
    for (i, s) in inst.gas_sources.iter().enumerate() {
        a.set(node(&s.node), i, 1);
    }
    let mut b = SparseIncidence::new(nodes, inst.gas_pipelines.len());
    for (p, pipe) in inst.gas_pipelines.iter().enumerate() {
        b.set(node(&pipe.from_node), p, 1);
        b.set(node(&pipe.to_node), p, -1);
    }
    let mut c = SparseIncidence::new(buses, inst.generators.len());
    for (j, g) in inst.generators.iter().enumerate() {
        c.set(bus(&g.bus), j, 1);
    }
    let mut d = SparseIncidence::new(buses, inst.lines.len());
    for (l, line) in inst.lines.iter().enumerate() {
        d.set(bus(&line.from_bus), l, 1);
        d.set(bus(&line.to_bus), l, -1);
    }
    Incidence { a, b, c, d }
}
