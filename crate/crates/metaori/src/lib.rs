//! Parametric design engine for Meta-Ori inflatable actuators: a Kresling
//! origami pneumatic transmitter inside a bistable cylindrical metashell.

pub mod config;
pub mod geom;
pub mod integrate;
pub mod kresling;
pub mod mechanics;
pub mod mesh;
pub mod metashell;
pub mod numeric;
pub mod par;
