//! Predictive classification of pipeline incident data with a deviant-learning
//! sequence memory.
//!
//! The pipeline is: labeled feature rows ([`dataset`]) are fixed-point
//! encoded into integer chunks and optionally thinned by a skip-sequence
//! step ([`representation`]); a bounded memory recalls and extrapolates
//! chunks ([`dla`]); predictions are scored and labeled ([`classifier`]).
//! [`lstm`] is a from-scratch baseline and [`harness`] drives the
//! experiments.

pub mod classifier;
pub mod dataset;
pub mod dla;
pub mod harness;
pub mod lstm;
pub mod representation;

pub use classifier::{assign_label, mapca, MapcaReport};
pub use dataset::{bundled_threat_sample, load_csv, synth_incident_set, Exemplar, ExemplarSet};
pub use dla::{DlaConfig, MemoryStore, Prediction};
pub use representation::{apply_sks, decode, encode, EncoderConfig, IntegerChunk, SksPolicy};
