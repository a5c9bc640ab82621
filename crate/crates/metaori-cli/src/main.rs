use clap::{Args, Parser, Subcommand, ValueEnum};
use metaori::config::run_sweep;
use metaori::mesh::{export_mesh, read_mesh, validate_mesh, MeshFormat};
use metaori::par::Exec;
use metaori_cli::{assembly, curves, load_config, sequence, service, write_file, CliError};
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "metaori", version, about = "Meta-Ori actuator generator and mechanics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Design document (JSON).
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Named preset, used when no document is given.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Stl,
    Obj,
}

#[derive(Clone, Copy, ValueEnum)]
enum Part {
    Assembly,
    Shell,
    Origami,
}

#[derive(Subcommand)]
enum Command {
    /// Write the printable mesh.
    Generate {
        #[command(flatten)]
        source: Source,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "stl")]
        format: Format,
        #[arg(long, value_enum, default_value = "assembly")]
        part: Part,
    },
    /// Write force, pressure and event CSV files.
    Curves {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Simulate volume-controlled inflation and deflation of the segments.
    Sequence {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Volume steps in each direction.
        #[arg(long, default_value_t = 400)]
        steps: usize,
    },
    /// Evaluate one parameter over a list of values.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Parameter path such as `metashell.h`.
        #[arg(long)]
        path: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a design document or a mesh file.
    Validate {
        #[command(flatten)]
        source: Source,
        /// STL or OBJ file to check instead of a design.
        #[arg(long, conflicts_with_all = ["config", "preset"])]
        mesh: Option<PathBuf>,
    },
    /// Serve the design API on the loopback interface.
    Serve {
        #[arg(long, default_value_t = 8765)]
        port: u16,
        /// Address to bind.
        #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        host: IpAddr,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn source(s: &Source) -> Result<metaori::config::DesignConfig, CliError> {
    load_config(s.config.as_deref(), s.preset.as_deref())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate { source: s, out, format, part } => {
            let cfg = source(&s)?;
            let a = assembly(&cfg)?;
            let mesh = match part {
                Part::Assembly => &a.mesh,
                Part::Shell => &a.shell.mesh,
                Part::Origami => &a.origami.wall_mesh,
            };
            let format = match format {
                Format::Stl => MeshFormat::StlBinary,
                Format::Obj => MeshFormat::ObjAscii,
            };
            let report = validate_mesh(mesh);
            if !report.is_valid() {
                return Err(CliError::Validation(format!(
                    "generated mesh is invalid: {}",
                    report.problems().join("; ")
                )));
            }
            write_file(&out, export_mesh(mesh, format)?)?;
            eprintln!(
                "{}: {} triangles, volume {:.3} mm³, χ = {}, open {:.3} mm, closed {:.3} mm",
                out.display(),
                report.triangle_count,
                report.signed_volume,
                report.euler_characteristic,
                a.shell.open_height,
                a.shell.closed_height
            );
        }
        Command::Curves { source: s, out_dir } => {
            let a = curves(&source(&s)?)?;
            write_file(&out_dir.join("fd_meta.csv"), a.fd_meta.to_csv())?;
            write_file(&out_dir.join("fd_ori.csv"), a.fd_ori.to_csv())?;
            write_file(&out_dir.join("fd_combined.csv"), a.fd_combined.to_csv())?;
            write_file(&out_dir.join("pv.csv"), a.pv.to_csv())?;
            write_file(&out_dir.join("events.csv"), a.pv.events_csv())?;
            print!("{}", a.pv.events_csv());
            eprintln!(
                "peak {:.2} mbar, minimum {:.2} mbar, bistable {}, elongation {}",
                a.pv.max_pressure(),
                a.pv.min_pressure(),
                a.pv.bistable,
                a.elongation.map_or("n/a".into(), |e| format!("{e:.1}%"))
            );
        }
        Command::Sequence { source: s, out_dir, steps } => {
            let (_, r) = sequence(&source(&s)?, steps)?;
            write_file(&out_dir.join("sequence.csv"), r.to_csv())?;
            write_file(&out_dir.join("sequence_events.csv"), r.events_csv())?;
            print!("{}", r.events_csv());
        }
        Command::Sweep { source: s, path, values, out } => {
            let table = run_sweep(&source(&s)?, &path, &values, Exec::default())?;
            let csv = table.to_csv();
            match out {
                Some(p) => write_file(&p, csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Validate { source: s, mesh } => match mesh {
            Some(path) => validate_file(&path)?,
            None => {
                let cfg = source(&s)?;
                println!("{}", cfg.to_json());
                eprintln!("design is valid");
            }
        },
        Command::Serve { port, host } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let addr = SocketAddr::new(host, port);
                let listener = tokio::net::TcpListener::bind(addr).await?;
                eprintln!("serving on http://{}", listener.local_addr()?);
                axum::serve(listener, service::router()).await
            })?;
        }
    }
    Ok(())
}

fn validate_file(path: &Path) -> Result<(), CliError> {
    let format = match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("stl") => MeshFormat::StlBinary,
        Some("obj") => MeshFormat::ObjAscii,
        _ => return Err(CliError::Validation(format!("{}: expected a .stl or .obj file", path.display()))),
    };
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mesh = read_mesh(&bytes, format)?;
    let report = validate_mesh(&mesh);
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if report.is_valid() {
        Ok(())
    } else {
        Err(CliError::Validation(report.problems().join("; ")))
    }
}
