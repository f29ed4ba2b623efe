//! Compiler core for MDML, a textual modeling language for IoT things with
//! embedded machine-learning tasks.
//!
//! The pipeline is: [`syntax`] turns `.mdml` text into a [`ir::SourceModel`];
//! [`linker`] resolves imports and composes platform-independent models with
//! platform-specific annotations and configurations; [`mlcore`] and
//! [`modelconv`] train, serialize and quantize the compact neural models;
//! [`platform`] decides whether a model fits a target; [`codegen`] emits the
//! deployable source tree.

pub mod codegen;
pub mod ir;
pub mod linker;
pub mod mlcore;
pub mod modelconv;
pub mod platform;
pub mod syntax;
