//! Power-confluent graph drawing.
//!
//! The pipeline turns a simple graph into a bundled drawing in five stages:
//! greedy power graph decomposition ([`power`]), conversion of the module
//! hierarchy into an edge routing graph ([`routing`]), stress-based node
//! placement ([`layout`]), B-spline curve construction ([`spline`]), and SVG
//! rendering with crossing diagnostics ([`render`]). [`pipeline`] glues the
//! stages together behind the command line interface.

pub mod graph;
pub mod layout;
pub mod pipeline;
pub mod power;
pub mod render;
pub mod routing;
pub mod spline;
