//! Protocol composition over Cartesian products.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::engine::{input, run_protocol, Emission, Protocol, Received, Target};
use crate::graph::{cartesian_product, Graph};
use crate::protocols::ProtocolError;

const FACTOR_CHECK_TOL: f64 = 1e-6;

/// Runs the first factor's protocol simultaneously on every first-factor
/// fiber (edges within fibers only), then the second factor's protocol on
/// every second-factor fiber seeded with the phase-one results. Rounds add;
/// when both factors are exact the composite leaves the global sum
/// everywhere in rounds(p1) + rounds(p2).
///
/// Product vertices are labeled `(a, b) -> a * n2 + b`, matching the
/// Cartesian product construction in the graph module.
pub struct ProductProtocol {
    name: String,
    n2: usize,
    rounds1: usize,
    rounds2: usize,
    first: Box<dyn Protocol>,
    second: Box<dyn Protocol>,
    g1: Graph,
    g2: Graph,
}

impl ProductProtocol {
    /// Both factor protocols are checked to finalize to the exact sum on
    /// their factor graphs (ones and a fixed pseudorandom input) before
    /// composition is allowed.
    pub fn new(
        g1: Graph,
        first: Box<dyn Protocol>,
        g2: Graph,
        second: Box<dyn Protocol>,
    ) -> Result<Self, ProtocolError> {
        for (which, (g, p)) in [(&g1, &first), (&g2, &second)].into_iter().enumerate() {
            for x in [input::ones(g.n()), input::uniform(g.n(), 0x5eed)] {
                let r = run_protocol(g, p.as_ref(), &x, false)?;
                if r.target != Target::Sum || r.max_rel_error > FACTOR_CHECK_TOL {
                    return Err(ProtocolError::FactorNotExact {
                        which,
                        max_rel_error: r.max_rel_error,
                    });
                }
            }
        }
        Ok(ProductProtocol {
            name: format!("product({} x {})", first.name(), second.name()),
            n2: g2.n(),
            rounds1: first.rounds(),
            rounds2: second.rounds(),
            first,
            second,
            g1,
            g2,
        })
    }

    /// The product graph this protocol runs on.
    pub fn product_graph(&self) -> Graph {
        cartesian_product(&self.g1, &self.g2)
    }

    fn coords(&self, vertex: usize) -> (usize, usize) {
        (vertex / self.n2, vertex % self.n2)
    }
}

impl Protocol for ProductProtocol {
    fn name(&self) -> &str {
        &self.name
    }

    fn technique(&self) -> &str {
        "factor-composition"
    }

    fn rounds(&self) -> usize {
        self.rounds1 + self.rounds2
    }

    fn init_state(&self, vertex: usize, input: f64) -> Vec<f64> {
        let (a, b) = self.coords(vertex);
        let state = self.first.init_state(a, input);
        if self.rounds1 == 0 {
            let value = self.first.finalize(a, &state);
            self.second.init_state(b, value)
        } else {
            state
        }
    }

    fn emit(&self, round: usize, vertex: usize, state: &[f64]) -> Vec<Emission> {
        let (a, b) = self.coords(vertex);
        if round <= self.rounds1 {
            self.first
                .emit(round, a, state)
                .into_iter()
                .map(|e| Emission {
                    to: e.to * self.n2 + b,
                    value: e.value,
                })
                .collect()
        } else {
            self.second
                .emit(round - self.rounds1, b, state)
                .into_iter()
                .map(|e| Emission {
                    to: a * self.n2 + e.to,
                    value: e.value,
                })
                .collect()
        }
    }

    fn absorb(&self, round: usize, vertex: usize, state: &mut Vec<f64>, received: &[Received]) {
        let (a, b) = self.coords(vertex);
        if round <= self.rounds1 {
            let local: Vec<Received> = received
                .iter()
                .map(|r| Received {
                    from: r.from / self.n2,
                    value: r.value,
                })
                .collect();
            self.first.absorb(round, a, state, &local);
            if round == self.rounds1 {
                // phase boundary: fold the fiber sum into the second phase
                let value = self.first.finalize(a, state);
                *state = self.second.init_state(b, value);
            }
        } else {
            let local: Vec<Received> = received
                .iter()
                .map(|r| Received {
                    from: r.from % self.n2,
                    value: r.value,
                })
                .collect();
            self.second.absorb(round - self.rounds1, b, state, &local);
        }
    }

    fn finalize(&self, vertex: usize, state: &[f64]) -> f64 {
        let (_, b) = self.coords(vertex);
        self.second.finalize(b, state)
    }
}
