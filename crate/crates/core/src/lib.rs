// SPDX-License-Identifier: Apache-2.0

//! Evolutionary search for approximate multilayer perceptrons whose
//! multiplications are power-of-two shifts and whose summands are pruned bit
//! by bit, aimed at bespoke combinational circuits where every remaining full
//! adder costs area.
//!
//! The pipeline: [`datio`] turns a CSV into quantized integer features,
//! [`qarith`] defines the model and its bit-exact inference, [`areamodel`]
//! counts adder-tree full adders, [`evolver`] searches the accuracy/area
//! trade-off with NSGA-II, and [`netlist`] turns a chosen model into a
//! gate-level netlist and Verilog.
//!
//! ```
//! use axgen::qarith::{forward, ApproxMlp, MlpConfig};
//! use axgen::areamodel::mlp_area;
//!
//! let theta = ApproxMlp::dense(&[2, 2], &MlpConfig::default()).unwrap();
//! let out = forward(&theta, &[3, 9]).unwrap();
//! assert_eq!(out.scores, vec![12, 12]);
//! assert_eq!(out.class, 0);
//! // two summand rows per column need no full adders
//! assert_eq!(mlp_area(&theta), 0);
//! ```

pub mod areamodel;
pub mod cli;
pub mod datio;
mod error;
pub mod evolver;
pub mod netlist;
pub mod qarith;
pub mod rng;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/area-model.md")]
    mod area_model {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/netlists.md")]
    mod netlists {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
