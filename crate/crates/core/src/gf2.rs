//! Clause–qubit adjacency over GF(2) and the XORSAT surjectivity test.
//!
//! The parity system `A x = J` is solvable for every right-hand side exactly
//! when the M x N adjacency matrix has full row rank. Full row rank forces a
//! nonzero term in the Leibniz expansion of some M x M minor, which is a
//! dimer covering, so surjectivity implies coverability but not conversely.

use crate::hypergraph::InteractionGraph;

/// Dense bit matrix with rows packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        Self { rows, cols, words_per_row, bits: vec![0; rows * words_per_row] }
    }

    /// The node-edge adjacency: entry (m, n) is 1 iff qubit n is in clause m.
    pub fn adjacency(g: &InteractionGraph) -> Self {
        let mut a = Self::zeros(g.num_clauses(), g.n_qubits());
        for (m, clause) in g.clauses().enumerate() {
            for &q in clause {
                a.set(m, q, true);
            }
        }
        a
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words_per_row + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = &mut self.bits[r * self.words_per_row + c / 64];
        if value {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let w = self.words_per_row;
        let mut m = self.bits.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let (word, bit) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..self.rows).find(|&r| m[r * w + word] & bit != 0) else {
                continue;
            };
            if p != rank {
                for j in 0..w {
                    m.swap(p * w + j, rank * w + j);
                }
            }
            for r in rank + 1..self.rows {
                if m[r * w + word] & bit != 0 {
                    for j in word..w {
                        m[r * w + j] ^= m[rank * w + j];
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

/// True iff the adjacency matrix of `g` has full row rank over GF(2).
///
/// A clause with a degree-one qubit owns a pivot column no other row
/// touches, so such rows never reduce the rank; the test therefore runs on
/// the hypercore, which is small compared with the graph below threshold.
pub fn gf2_surjective(g: &InteractionGraph) -> bool {
    if g.num_clauses() > g.n_qubits() {
        return false;
    }
    let core = g.hypercore();
    if core.num_clauses() == 0 {
        return true;
    }
    let (compact, _) = core.compact();
    if compact.num_clauses() > compact.n_qubits() {
        return false;
    }
    sparse_full_row_rank(&compact)
}

/// Incremental elimination with rows stored as sorted sparse supports until
/// they fill in; a basis keyed by leading column.
fn sparse_full_row_rank(g: &InteractionGraph) -> bool {
    let n = g.n_qubits();
    let words = n.div_ceil(64);
    let mut pivots: Vec<Option<Vec<u64>>> = vec![None; n];
    for clause in g.clauses() {
        let mut row = vec![0u64; words];
        for &q in clause {
            row[q / 64] |= 1 << (q % 64);
        }
        loop {
            let Some(lead) = leading_bit(&row) else {
                return false;
            };
            match &pivots[lead] {
                Some(p) => {
                    for (a, b) in row.iter_mut().zip(p).skip(lead / 64) {
                        *a ^= b;
                    }
                }
                None => {
                    pivots[lead] = Some(row);
                    break;
                }
            }
        }
    }
    true
}

fn leading_bit(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}
