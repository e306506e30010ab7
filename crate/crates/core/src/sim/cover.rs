use super::geometry::CodeGeometry;
use std::collections::VecDeque;

/// Marker for an unreachable class.
pub const UNREACHABLE: u32 = u32::MAX;

/// Shortest-path lengths between nodes, resolved by homology class.
///
/// `get(c, u, v)` is the fewest qubits on a path from `u` to `v` whose
/// cut-crossing parities equal `c`. Computed by breadth-first search on the
/// `2^k`-sheeted cover in which cut qubits switch sheets. Paths may run
/// through boundary nodes.
#[derive(Debug, Clone)]
pub struct CoverDistances {
    n_nodes: usize,
    n_classes: usize,
    table: Vec<u32>,
}

impl CoverDistances {
    pub fn get(&self, class: u8, u: usize, v: usize) -> u32 {
        self.table[(class as usize * self.n_nodes + u) * self.n_nodes + v]
    }

    /// Unconstrained distance and the lowest class attaining it.
    pub fn min(&self, u: usize, v: usize) -> (u32, u8) {
        (0..self.n_classes as u8).map(|c| (self.get(c, u, v), c)).min().unwrap()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// `d_even`/`d_odd` for a single cut.
    pub fn even_odd(&self, u: usize, v: usize) -> (u32, u32) {
        (self.get(0, u, v), self.get(1, u, v))
    }
}

pub fn cover_distances(g: &CodeGeometry) -> CoverDistances {
    let n = g.n_nodes();
    let nc = g.n_classes();
    let adj = g.adjacency();
    let mut table = vec![UNREACHABLE; nc * n * n];
    let mut dist = vec![UNREACHABLE; nc * n];
    let mut queue = VecDeque::new();
    for src in 0..n {
        dist.fill(UNREACHABLE);
        dist[src] = 0;
        queue.clear();
        queue.push_back((src, 0u8));
        while let Some((u, c)) = queue.pop_front() {
            let d = dist[c as usize * n + u];
            for &(v, q) in &adj[u] {
                let c2 = c ^ g.qubits[q].cut_mask;
                let slot = c2 as usize * n + v;
                if dist[slot] == UNREACHABLE {
                    dist[slot] = d + 1;
                    queue.push_back((v, c2));
                }
            }
        }
        for c in 0..nc {
            for v in 0..n {
                table[(c * n + src) * n + v] = dist[c * n + v];
            }
        }
    }
    CoverDistances { n_nodes: n, n_classes: nc, table }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::geometry::{build_geometry, GeometryKind, Orientation};

    #[test]
    fn torus_adjacent_pair() {
        let g = build_geometry(GeometryKind::Torus, 4).unwrap();
        let d = cover_distances(&g);
        // (0,1)-(0,2): horizontal neighbours away from the vertical cut
        let (u, v) = (1, 2);
        assert_eq!(d.get(0, u, v), 1);
        assert_eq!(d.get(1, u, v), 3);
        assert_eq!(d.get(2, u, v), 5);
        assert_eq!(d.get(3, u, v), 7);
        assert_eq!(d.get(0, u, u), 0);
        assert_eq!(d.get(1, u, u), 4);
        assert_eq!(d.get(3, u, u), 8);
    }

    #[test]
    fn planar_boundaries() {
        for l in 2..8 {
            let g = build_geometry(GeometryKind::Planar, l).unwrap();
            let d = cover_distances(&g);
            let (lt, rt) = (g.left().unwrap(), g.right().unwrap());
            assert_eq!(d.even_odd(lt, rt), (UNREACHABLE, l as u32));
            assert_eq!(d.even_odd(lt, lt).0, 0);
        }
    }

    #[test]
    fn min_is_graph_distance_and_symmetric() {
        for kind in [GeometryKind::Torus, GeometryKind::Planar] {
            let g = build_geometry(kind, 5).unwrap();
            let d = cover_distances(&g);
            let n = g.n_nodes();
            let adj = g.adjacency();
            for s in 0..n {
                let mut bfs = vec![u32::MAX; n];
                bfs[s] = 0;
                let mut q = VecDeque::from([s]);
                while let Some(u) = q.pop_front() {
                    for &(v, _) in &adj[u] {
                        if bfs[v] == u32::MAX {
                            bfs[v] = bfs[u] + 1;
                            q.push_back(v);
                        }
                    }
                }
                for t in 0..n {
                    assert_eq!(d.min(s, t).0, bfs[t]);
                    for c in 0..d.n_classes() as u8 {
                        assert_eq!(d.get(c, s, t), d.get(c, t, s));
                    }
                }
            }
        }
    }

    #[test]
    fn planar_reflection_symmetry() {
        let l = 5;
        let g = build_geometry(GeometryKind::Planar, l).unwrap();
        let d = cover_distances(&g);
        let flip = |n: usize| {
            let (r, c) = (n / (l - 1), n % (l - 1));
            (l - 1 - r) * (l - 1) + c
        };
        for u in 0..g.n_checks {
            for v in 0..g.n_checks {
                assert_eq!(d.even_odd(u, v), d.even_odd(flip(u), flip(v)));
            }
        }
        assert!(g.qubits.iter().any(|q| q.orientation == Orientation::Vertical));
    }
}
