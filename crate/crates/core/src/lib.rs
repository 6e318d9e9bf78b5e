//! Building blocks for semantic maps of document sets.
//!
//! The pipeline runs from raw documents to a word–document count matrix
//! ([`corpus`]), through term statistics used to pick the words worth
//! mapping ([`termstats`]), to one-mode similarity and co-occurrence
//! structure ([`vectorspace`]), rotated factor solutions ([`factors`]),
//! two-dimensional layouts ([`layout`]) and finally the Pajek, CSV and SVG
//! writers in [`export`].

pub mod corpus;
pub mod error;
pub mod export;
pub mod factors;
pub mod graph;
pub mod layout;
pub mod termstats;
pub mod vectorspace;

pub use error::{Error, Result};
