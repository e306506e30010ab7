use super::geometry::CodeGeometry;
use super::pattern::ErrorPattern;

/// Checks with an odd number of flipped incident qubits, ascending.
pub fn syndrome(g: &CodeGeometry, e: &ErrorPattern) -> Vec<usize> {
    let mut odd = vec![false; g.n_checks];
    for q in e.iter_ones() {
        for &n in &g.qubits[q].ends {
            if n < g.n_checks {
                odd[n] ^= true;
            }
        }
    }
    odd.iter().enumerate().filter(|(_, &o)| o).map(|(i, _)| i).collect()
}

/// Cut-crossing parities of `e`, bit `k` for cut `k`.
pub fn error_class(g: &CodeGeometry, e: &ErrorPattern) -> u8 {
    e.iter_ones().fold(0, |acc, q| acc ^ g.qubits[q].cut_mask)
}
