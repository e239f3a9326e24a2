//! Workbench for height-1 identities over finite structures.
//!
//! The crate is organized around four pieces of machinery:
//!
//! - [`graph`]: finite undirected graphs, homomorphism / 3-coloring search,
//!   critical-edge trimming, the exclusive-or gadget, the glue construction
//!   and the chain it generates;
//! - [`cond`]: height-1 conditions as syntactic data, the graph-to-condition
//!   translation, triviality (label cover), entailment via formal-minor
//!   closure and minor-derivation certificates;
//! - [`algebra`]: finite relational structures and their polymorphism
//!   clones — indicator instances, witness search, quotient powers, the
//!   graph on ternary clone elements, pseudo-Siggers probing and a
//!   pp-formula evaluator;
//! - [`forb`] and [`growth`]: the polynomial-time CSPs for forbidden-image
//!   templates, tuple encodings, loop-like obstruction listings, and the
//!   exact-arithmetic growth recursion.
//!
//! All searches are deterministic: yes/no answers come with canonical-least
//! witnesses, and every emitted certificate can be re-checked by an
//! independent validator that shares no code with the search that produced
//! it.

pub mod algebra;
pub mod cond;
pub mod forb;
pub mod graph;
pub mod growth;
pub mod io;
pub mod limits;
pub(crate) mod solver;
pub(crate) mod util;
