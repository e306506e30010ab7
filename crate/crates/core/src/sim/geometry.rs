use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};

/// Lattice family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Torus,
    Planar,
}

impl GeometryKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "torus" | "toric" => Some(GeometryKind::Torus),
            "planar" => Some(GeometryKind::Planar),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Torus => "torus",
            GeometryKind::Planar => "planar",
        }
    }
}

/// Orientation of a qubit edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A qubit on a lattice edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Qubit {
    pub orientation: Orientation,
    pub row: usize,
    pub col: usize,
    /// Endpoint nodes; checks are `0..n_checks`, planar boundaries follow.
    pub ends: [usize; 2],
    /// Bit `k` set when the qubit lies on cut `k`.
    pub cut_mask: u8,
}

/// Toric or planar code layout for bit-flip noise.
///
/// Checks are vertices. On the planar patch the left and right rough
/// boundaries are virtual nodes `n_checks` and `n_checks + 1`.
#[derive(Debug, Clone)]
pub struct CodeGeometry {
    pub kind: GeometryKind,
    pub l: usize,
    pub qubits: Vec<Qubit>,
    pub check_qubits: Vec<Vec<usize>>,
    pub n_checks: usize,
    pub cuts: Vec<Vec<usize>>,
    pub logicals: Vec<Vec<usize>>,
    /// Dual plaquettes: stabilizers that commute with every check.
    pub plaquettes: Vec<Vec<usize>>,
}

impl CodeGeometry {
    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    /// Checks plus boundary nodes.
    pub fn n_nodes(&self) -> usize {
        self.n_checks + self.n_boundaries()
    }

    pub fn n_boundaries(&self) -> usize {
        match self.kind {
            GeometryKind::Torus => 0,
            GeometryKind::Planar => 2,
        }
    }

    /// Number of independent cuts (logical qubits).
    pub fn n_cuts(&self) -> usize {
        self.cuts.len()
    }

    /// Number of homology classes, `2^{n_cuts}`.
    pub fn n_classes(&self) -> usize {
        1 << self.cuts.len()
    }

    pub fn left(&self) -> Option<usize> {
        (self.kind == GeometryKind::Planar).then_some(self.n_checks)
    }

    pub fn right(&self) -> Option<usize> {
        (self.kind == GeometryKind::Planar).then_some(self.n_checks + 1)
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        node >= self.n_checks
    }

    /// Node adjacency as `(neighbour, qubit)` lists.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n_nodes()];
        for (q, qb) in self.qubits.iter().enumerate() {
            let [a, b] = qb.ends;
            adj[a].push((b, q));
            adj[b].push((a, q));
        }
        adj
    }
}

/// Builds the torus or planar layout at distance `l`.
pub fn build_geometry(kind: GeometryKind, l: usize) -> Result<CodeGeometry> {
    if l < 2 {
        return domain(format!("L = {l} must be at least 2"));
    }
    Ok(match kind {
        GeometryKind::Torus => torus(l),
        GeometryKind::Planar => planar(l),
    })
}

fn torus(l: usize) -> CodeGeometry {
    let vid = |r: usize, c: usize| (r % l) * l + (c % l);
    let h = |r: usize, c: usize| (r % l) * l + (c % l);
    let v = |r: usize, c: usize| l * l + (r % l) * l + (c % l);
    let mut qubits = Vec::with_capacity(2 * l * l);
    for r in 0..l {
        for c in 0..l {
            qubits.push(Qubit {
                orientation: Orientation::Horizontal,
                row: r,
                col: c,
                ends: [vid(r, c), vid(r, c + 1)],
                cut_mask: u8::from(c == 0),
            });
        }
    }
    for r in 0..l {
        for c in 0..l {
            qubits.push(Qubit {
                orientation: Orientation::Vertical,
                row: r,
                col: c,
                ends: [vid(r, c), vid(r + 1, c)],
                cut_mask: if r == 0 { 2 } else { 0 },
            });
        }
    }
    let check_qubits = (0..l * l)
        .map(|i| {
            let (r, c) = (i / l, i % l);
            vec![h(r, c), h(r, c + l - 1), v(r, c), v(r + l - 1, c)]
        })
        .collect();
    let plaquettes = (0..l * l)
        .map(|i| {
            let (r, c) = (i / l, i % l);
            vec![h(r, c), h(r + 1, c), v(r, c), v(r, c + 1)]
        })
        .collect();
    CodeGeometry {
        kind: GeometryKind::Torus,
        l,
        qubits,
        check_qubits,
        n_checks: l * l,
        cuts: vec![(0..l).map(|r| h(r, 0)).collect(), (0..l).map(|c| v(0, c)).collect()],
        logicals: vec![(0..l).map(|c| h(0, c)).collect(), (0..l).map(|r| v(r, 0)).collect()],
        plaquettes,
    }
}

fn planar(l: usize) -> CodeGeometry {
    let n_checks = l * (l - 1);
    let (left, right) = (n_checks, n_checks + 1);
    let check = |r: usize, c: usize| r * (l - 1) + c;
    let h = |r: usize, c: usize| r * l + c;
    let v = |r: usize, c: usize| l * l + r * (l - 1) + c;
    let mut qubits = Vec::with_capacity(l * l + (l - 1) * (l - 1));
    for r in 0..l {
        for c in 0..l {
            let a = if c == 0 { left } else { check(r, c - 1) };
            let b = if c == l - 1 { right } else { check(r, c) };
            qubits.push(Qubit {
                orientation: Orientation::Horizontal,
                row: r,
                col: c,
                ends: [a, b],
                cut_mask: u8::from(c == 0),
            });
        }
    }
    for r in 0..l - 1 {
        for c in 0..l - 1 {
            qubits.push(Qubit {
                orientation: Orientation::Vertical,
                row: r,
                col: c,
                ends: [check(r, c), check(r + 1, c)],
                cut_mask: 0,
            });
        }
    }
    let mut check_qubits = vec![Vec::new(); n_checks];
    for (q, qb) in qubits.iter().enumerate() {
        for &e in &qb.ends {
            if e < n_checks {
                check_qubits[e].push(q);
            }
        }
    }
    let mut plaquettes = Vec::with_capacity((l - 1) * l);
    for r in 0..l - 1 {
        for c in 0..l {
            let mut p = vec![h(r, c), h(r + 1, c)];
            if c >= 1 {
                p.push(v(r, c - 1));
            }
            if c + 1 < l {
                p.push(v(r, c));
            }
            plaquettes.push(p);
        }
    }
    CodeGeometry {
        kind: GeometryKind::Planar,
        l,
        qubits,
        check_qubits,
        n_checks,
        cuts: vec![(0..l).map(|r| h(r, 0)).collect()],
        logicals: vec![(0..l).map(|c| h(0, c)).collect()],
        plaquettes,
    }
}
