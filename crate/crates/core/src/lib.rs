//! Elaborating typechecker and metatheory workbench for a λ-calculus with
//! intersection types, union types and a merge construct.
//!
//! Intersections elaborate to products, unions to sums, and merges to the
//! component selected by the typing derivation. The crate needs only `alloc`.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::result_large_err)]

extern crate alloc;

pub mod ast;
pub mod dynamics;
pub mod elab;
pub mod metatheory;
pub mod subtyping;
pub mod surface;
pub mod target;
