use super::{PRESETS, SCHEMA_VERSION};
use serde_json::{json, Value};

fn length(description: &str) -> Value {
    json!({"type": "number", "exclusiveMinimum": 0, "unit": "mm", "description": description})
}

fn count(min: u64, description: &str) -> Value {
    json!({"type": "integer", "minimum": min, "description": description})
}

fn fraction(description: &str) -> Value {
    json!({"type": "number", "exclusiveMinimum": 0, "maximum": 1, "description": description})
}

/// JSON Schema of design documents, with units and ranges per field.
pub fn schema() -> Value {
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "Meta-Ori design",
        "type": "object",
        "additionalProperties": false,
        "properties": {
            "schema": {"const": SCHEMA_VERSION},
            "preset": {"enum": PRESETS, "description": "start from a named preset; other keys override it"},
            "kresling": {
                "type": "object",
                "additionalProperties": false,
                "required": ["n", "a", "b", "theta_deg", "alpha_deg", "t_face", "levels"],
                "properties": {
                    "n": count(3, "polygon side count"),
                    "a": length("diagonal crease length"),
                    "b": length("polygon edge length"),
                    "theta_deg": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 180, "unit": "deg",
                                  "description": "pattern inclination of the diagonal"},
                    "alpha_deg": {"type": "number", "exclusiveMinimum": 0, "maximum": 180, "unit": "deg",
                                  "description": "requested fold dihedral"},
                    "t_face": length("face thickness, below the shortest pattern edge"),
                    "levels": count(1, "mirrored pairs stacked vertically"),
                    "chirality": {"enum": ["right", "left"], "default": "right"}
                }
            },
            "metashell": {
                "type": "object",
                "additionalProperties": false,
                "required": ["c", "l", "t", "h", "r", "delta", "wall_height", "rows", "cols", "depth", "infill_per_row"],
                "properties": {
                    "c": length("support column width"),
                    "l": length("curved beam span"),
                    "t": length("beam thickness, below h"),
                    "h": length("beam apex rise"),
                    "r": length("support widening radius"),
                    "delta": {"type": "number", "minimum": 0, "unit": "mm", "description": "support to beam clearance"},
                    "wall_height": length("solid wall below and above the rows"),
                    "rows": count(1, "axial cell rows"),
                    "cols": count(2, "cells around the circumference"),
                    "depth": length("radial thickness"),
                    "infill_per_row": {"type": "array", "items": fraction("print infill"),
                                       "description": "one value per row, bottom first"},
                    "support": {"enum": ["linear", "fillet"], "default": "linear"},
                    "pitch_scale": {"type": "number", "exclusiveMinimum": 0, "default": 1.0,
                                    "description": "wrapped to planar cell pitch ratio"},
                    "mesh_size": {"type": "number", "exclusiveMinimum": 0, "default": 0.5, "unit": "mm",
                                  "description": "planar grid spacing, at most t"}
                }
            },
            "material": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "youngs_modulus": {"type": "number", "exclusiveMinimum": 0, "default": 12.0, "unit": "MPa"},
                    "infill_floor": fraction("stiffness scale at zero infill"),
                    "bar_area": {"type": ["number", "null"], "exclusiveMinimum": 0, "unit": "mm^2",
                                 "description": "origami bar cross-section; t_face*b/2 when null"},
                    "hinge_stiffness": {"type": "number", "minimum": 0, "default": 0.0, "unit": "N*mm/rad"}
                }
            },
            "integration": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "lid_thickness": {"type": "number", "exclusiveMinimum": 0, "default": 2.0, "unit": "mm"},
                    "port_diameter": {"type": "number", "minimum": 0, "default": 4.0, "unit": "mm",
                                      "description": "0 seals the cavity"},
                    "clearance": {"type": "number", "minimum": 0, "default": 0.5, "unit": "mm"},
                    "port_segments": count(3, "polygon sides of the port")
                }
            },
            "segments": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "additionalProperties": false,
                    "required": ["infill", "levels"],
                    "properties": {"infill": fraction("print infill of the row"), "levels": count(1, "origami levels")}
                }
            }
        }
    })
}
