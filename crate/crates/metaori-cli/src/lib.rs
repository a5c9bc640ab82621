//! Command implementations and the local design service.

pub mod service;

use metaori::config::{parse_config, preset, Analysis, ConfigError, DesignConfig};
use metaori::integrate::{build_meta_ori, IntegrateError, MetaOriAssembly};
use metaori::kresling::KreslingError;
use metaori::mechanics::{simulate_sequence, volume_ramp, MechanicsError, SegmentResponse, SequenceResult};
use metaori::mesh::MeshError;
use metaori::par::Exec;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// Process exit status: 1 validation, 2 solver, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<MechanicsError> for CliError {
    fn from(e: MechanicsError) -> Self {
        match e {
            MechanicsError::InvalidParams(_) | MechanicsError::Shell(_) => CliError::Validation(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<IntegrateError> for CliError {
    fn from(e: IntegrateError) -> Self {
        match e {
            IntegrateError::Origami(KreslingError::Solve(_) | KreslingError::ClosureFailure { .. }) => {
                CliError::Solver(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<MeshError> for CliError {
    fn from(e: MeshError) -> Self {
        match e {
            MeshError::ParseError { .. } | MeshError::TruncatedFile { .. } => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Reads a design from a file, or expands a named preset.
pub fn load_config(path: Option<&Path>, preset_name: Option<&str>) -> Result<DesignConfig, CliError> {
    match (path, preset_name) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(parse_config(&text)?)
        }
        (None, Some(name)) => preset(name).ok_or_else(|| CliError::Validation(format!("unknown preset {name:?}"))),
        (None, None) => Ok(preset("paper").expect("paper preset")),
    }
}

pub fn assembly(cfg: &DesignConfig) -> Result<MetaOriAssembly, CliError> {
    Ok(build_meta_ori(&cfg.metashell, &cfg.kresling_params(), &cfg.integration)?)
}

pub fn curves(cfg: &DesignConfig) -> Result<Analysis, CliError> {
    Ok(Analysis::run(cfg)?)
}

/// Segment responses and the closed-open-closed trajectory in `steps`
/// volume steps each way.
pub fn sequence(cfg: &DesignConfig, steps: usize) -> Result<(Vec<SegmentResponse>, SequenceResult), CliError> {
    let specs = cfg.segment_specs()?;
    let segments = Exec::default()
        .map(&specs, |s| SegmentResponse::build(s, &cfg.material))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let ramp = volume_ramp(&segments, steps)?;
    let result = simulate_sequence(&segments, &ramp)?;
    Ok((segments, result))
}

pub fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
