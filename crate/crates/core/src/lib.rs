//! Touch-and-motion interaction engine for mobile data visualization.
//!
//! Raw touch and accelerometer input flows through the [`gesture`] recognizer
//! into the [`engine`], which routes gestures to inspection, selection,
//! navigation, aggregation and history operations over a laid-out chart.

pub mod aggregate;
pub mod chart;
pub mod config;
pub mod data;
pub mod demo;
pub mod engine;
pub mod geom;
pub mod gesture;
pub mod history;
pub mod inspect;
pub mod select;
pub mod snapshot;
pub mod trace;
pub mod view;
