//! The three reference N = M = 10, k = 3 instances.
//!
//! They are labelled by the behaviour originally reported for them:
//! (a) satisfiable by a product state, (b) satisfiable only by entangled
//! states, (c) unsatisfiable. The clause lists are embedded verbatim.

use serde::{Deserialize, Serialize};

use crate::hypergraph::InteractionGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReferenceInstance {
    A,
    B,
    C,
}

const CLAUSES_A: [[usize; 3]; 10] = [
    [3, 5, 8],
    [5, 6, 7],
    [0, 6, 8],
    [1, 3, 5],
    [0, 2, 5],
    [1, 3, 9],
    [1, 4, 9],
    [0, 1, 5],
    [2, 3, 7],
    [0, 1, 2],
];

const CLAUSES_B: [[usize; 3]; 10] = [
    [0, 1, 5],
    [0, 4, 5],
    [2, 5, 8],
    [5, 7, 9],
    [5, 6, 7],
    [5, 7, 8],
    [6, 8, 9],
    [0, 3, 5],
    [4, 6, 8],
    [2, 4, 9],
];

const CLAUSES_C: [[usize; 3]; 10] = [
    [2, 7, 8],
    [0, 4, 7],
    [4, 5, 6],
    [1, 5, 6],
    [1, 6, 9],
    [3, 5, 7],
    [0, 3, 7],
    [5, 6, 7],
    [1, 3, 7],
    [1, 6, 7],
];

impl ReferenceInstance {
    pub const ALL: [ReferenceInstance; 3] = [Self::A, Self::B, Self::C];

    pub fn graph(self) -> InteractionGraph {
        let clauses = match self {
            Self::A => &CLAUSES_A,
            Self::B => &CLAUSES_B,
            Self::C => &CLAUSES_C,
        };
        InteractionGraph::new(10, 3, clauses.iter().map(|c| c.to_vec()).collect())
            .expect("embedded instance is valid")
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::A => "a) PRODSAT",
            Self::B => "b) SAT-unPRODSAT",
            Self::C => "c) unSAT",
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            Self::A => "instance_a.json",
            Self::B => "instance_b.json",
            Self::C => "instance_c.json",
        }
    }

    pub fn letter(self) -> char {
        match self {
            Self::A => 'a',
            Self::B => 'b',
            Self::C => 'c',
        }
    }
}

impl std::str::FromStr for ReferenceInstance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Self::A),
            "b" => Ok(Self::B),
            "c" => Ok(Self::C),
            _ => Err(format!("unknown instance {s:?}, expected a, b or c")),
        }
    }
}
