//! Command-line interface for the multi-frame super-resolution benchmark.
//!
//! Subcommands: `degrade`, `reconstruct`, `bench`, `convergence`.
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 solver divergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use misr_cli::bench::{
    run_bench, run_convergence, BenchImage, RegChoice, SolverKnobs, TrialSpec, CONVERGENCE_ETA,
    CONVERGENCE_LAMBDA, CONVERGENCE_MAX_ITER,
};
use misr_cli::manifest::{read_burst, write_burst};
use misr_core::error::Error;
use misr_core::image::ImageGray;
use misr_core::io::{load_image, save_image};
use misr_core::operators::BlurKernel;
use misr_core::sim::{crop_to_multiple, degrade, DegradationParams};
use misr_core::solver::{reconstruct, SolverConfig, UpscalerMode};

const USAGE: &str = "\
misr, a multi-frame image super-resolution benchmark

USAGE:
  misr degrade --input F --out-dir D [options]
      --scale N --frames M --blur-size A --blur-sigma S --noise-sigma N
      --shift-range R --seed K --crop
  misr reconstruct --frames-dir D --out F [options]
      --mode {ete|interp} --reg {tikhonov|tv|btv} --lambda L --eta E
      --eps T --max-iter N --btv-p P --btv-alpha A --tv-eps E --trace F.csv
  misr bench --images DIR [options]
      --trials R --seed K --modes ete,interp --regs tikhonov,tv,btv
      --out-csv F --jobs N --no-bicubic --scale N --frames M --blur-size A
      --blur-sigma S --noise-sigma N --shift-range R --eta E --lambda L
      --eps T --max-iter N --btv-p P --btv-alpha A --tv-eps E
  misr convergence --input F --out-prefix P [options]
      --eta E --lambda L --max-iter N --seed K --scale N --frames M
      --blur-size A --blur-sigma S --noise-sigma N --shift-range R

Defaults reproduce the benchmark protocol: scale 3, 5 frames, 5x5 Gaussian
blur (sigma 1.2), noise sigma 1, shifts in [-5, 5], step 0.002, lambda 0.1,
tolerance 1e-5, at most 30 iterations. `convergence` uses the Tikhonov
trace protocol (step 0.008, lambda 0.3, cap 300, noise sigma 0).
";

/// Usage problem (exit 1), distinct from data/solver errors.
#[derive(Debug)]
struct UsageError(String);

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Divergence { .. } => 3,
        Error::InvalidParam(_) => 1,
        _ => 2,
    }
}

struct ArgCursor {
    args: Vec<String>,
    pos: usize,
}

impl ArgCursor {
    fn next(&mut self) -> Option<String> {
        let a = self.args.get(self.pos).cloned();
        if a.is_some() {
            self.pos += 1;
        }
        a
    }

    fn value(&mut self, flag: &str) -> Result<String, UsageError> {
        self.next()
            .ok_or_else(|| UsageError(format!("{} requires a value", flag)))
    }

    fn parse<T: std::str::FromStr>(&mut self, flag: &str) -> Result<T, UsageError> {
        let v = self.value(flag)?;
        v.parse::<T>()
            .map_err(|_| UsageError(format!("{}: cannot parse '{}'", flag, v)))
    }
}

/// Degradation options shared by degrade/bench/convergence.
struct DegradeOpts {
    scale: usize,
    frames: usize,
    blur_size: usize,
    blur_sigma: f64,
    noise_sigma: f64,
    shift_range: f64,
    seed: u64,
}

impl Default for DegradeOpts {
    fn default() -> Self {
        Self {
            scale: 3,
            frames: 5,
            blur_size: 5,
            blur_sigma: 1.2,
            noise_sigma: 1.0,
            shift_range: 5.0,
            seed: 1,
        }
    }
}

impl DegradeOpts {
    /// True if the flag was consumed.
    fn try_flag(&mut self, flag: &str, cur: &mut ArgCursor) -> Result<bool, UsageError> {
        match flag {
            "--scale" => self.scale = cur.parse(flag)?,
            "--frames" => self.frames = cur.parse(flag)?,
            "--blur-size" => self.blur_size = cur.parse(flag)?,
            "--blur-sigma" => self.blur_sigma = cur.parse(flag)?,
            "--noise-sigma" => self.noise_sigma = cur.parse(flag)?,
            "--shift-range" => self.shift_range = cur.parse(flag)?,
            "--seed" => self.seed = cur.parse(flag)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn params(&self) -> Result<DegradationParams, Error> {
        Ok(DegradationParams {
            scale: self.scale,
            kernel: BlurKernel::gaussian(self.blur_size, self.blur_sigma)?,
            noise_sigma: self.noise_sigma,
            frames: self.frames,
            shift_range: self.shift_range,
            rng_seed: self.seed,
        })
    }
}

/// Solver options shared by reconstruct/bench.
struct SolverOpts {
    knobs: SolverKnobs,
}

impl SolverOpts {
    fn try_flag(&mut self, flag: &str, cur: &mut ArgCursor) -> Result<bool, UsageError> {
        match flag {
            "--eta" => self.knobs.eta = cur.parse(flag)?,
            "--lambda" => self.knobs.lambda = cur.parse(flag)?,
            "--eps" => self.knobs.eps = cur.parse(flag)?,
            "--max-iter" => self.knobs.max_iter = cur.parse(flag)?,
            "--btv-p" => self.knobs.btv_window = cur.parse(flag)?,
            "--btv-alpha" => self.knobs.btv_decay = cur.parse(flag)?,
            "--tv-eps" => self.knobs.tv_epsilon = cur.parse(flag)?,
            _ => return Ok(false),
        }
        Ok(true)
    }
}

fn load_luma(path: &Path) -> Result<ImageGray, Error> {
    load_image(path)?.into_luma()
}

fn cmd_degrade(cur: &mut ArgCursor) -> Result<Result<(), Error>, UsageError> {
    let mut input: Option<PathBuf> = None;
    let mut out_dir: Option<PathBuf> = None;
    let mut crop = false;
    let mut opts = DegradeOpts::default();
    while let Some(flag) = cur.next() {
        match flag.as_str() {
            "--input" => input = Some(PathBuf::from(cur.value(&flag)?)),
            "--out-dir" => out_dir = Some(PathBuf::from(cur.value(&flag)?)),
            "--crop" => crop = true,
            other => {
                if !opts.try_flag(other, cur)? {
                    return Err(UsageError(format!("degrade: unknown flag '{}'", other)));
                }
            }
        }
    }
    let input = input.ok_or_else(|| UsageError("degrade: --input is required".into()))?;
    let out_dir = out_dir.ok_or_else(|| UsageError("degrade: --out-dir is required".into()))?;
    Ok((|| {
        let mut truth = load_luma(&input)?;
        if crop {
            truth = crop_to_multiple(&truth, opts.scale)?;
        }
        let params = opts.params()?;
        let burst = degrade(&truth, &params, opts.seed)?;
        write_burst(&out_dir, &burst, &params, opts.blur_sigma)?;
        println!(
            "wrote {} frames ({}x{}) and manifest.txt to {}",
            params.frames,
            burst.frame_set.lr_dims().0,
            burst.frame_set.lr_dims().1,
            out_dir.display()
        );
        Ok(())
    })())
}

fn cmd_reconstruct(cur: &mut ArgCursor) -> Result<Result<(), Error>, UsageError> {
    let mut frames_dir: Option<PathBuf> = None;
    let mut out: Option<PathBuf> = None;
    let mut trace_path: Option<PathBuf> = None;
    let mut mode = UpscalerMode::Ete;
    let mut reg = RegChoice::Btv;
    let mut solver = SolverOpts { knobs: SolverKnobs::default() };
    while let Some(flag) = cur.next() {
        match flag.as_str() {
            "--frames-dir" => frames_dir = Some(PathBuf::from(cur.value(&flag)?)),
            "--out" => out = Some(PathBuf::from(cur.value(&flag)?)),
            "--trace" => trace_path = Some(PathBuf::from(cur.value(&flag)?)),
            "--mode" => {
                mode = match cur.value(&flag)?.as_str() {
                    "ete" => UpscalerMode::Ete,
                    "interp" => UpscalerMode::Interp,
                    v => return Err(UsageError(format!("--mode: expected ete|interp, got '{}'", v))),
                }
            }
            "--reg" => {
                let v = cur.value(&flag)?;
                reg = RegChoice::parse(&v)
                    .ok_or_else(|| UsageError(format!("--reg: unknown regularizer '{}'", v)))?;
            }
            other => {
                if !solver.try_flag(other, cur)? {
                    return Err(UsageError(format!("reconstruct: unknown flag '{}'", other)));
                }
            }
        }
    }
    let frames_dir =
        frames_dir.ok_or_else(|| UsageError("reconstruct: --frames-dir is required".into()))?;
    let out = out.ok_or_else(|| UsageError("reconstruct: --out is required".into()))?;
    Ok((|| {
        let (frame_set, _manifest) = read_burst(&frames_dir)?;
        let cfg: SolverConfig = solver.knobs.config(reg, mode);
        let (estimate, trace) = reconstruct(&frame_set, &cfg)?;
        save_image(&out, &estimate.clamped(0.0, 255.0))?;
        if let Some(p) = &trace_path {
            std::fs::write(p, trace.to_csv())
                .map_err(|e| Error::Io(format!("{}: {}", p.display(), e)))?;
        }
        let last = trace.records().last();
        println!(
            "reconstructed {}x{} in {} iterations (final relative change {:.3e}) -> {}",
            estimate.height(),
            estimate.width(),
            trace.len(),
            last.map(|r| r.rel_change).unwrap_or(0.0),
            out.display()
        );
        Ok(())
    })())
}

fn list_images(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {}", dir.display(), e)))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()).as_deref(),
                Some("pgm") | Some("png")
            )
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Io(format!("{}: no .pgm or .png images found", dir.display())));
    }
    Ok(paths)
}

fn cmd_bench(cur: &mut ArgCursor) -> Result<Result<(), Error>, UsageError> {
    let mut images_dir: Option<PathBuf> = None;
    let mut out_csv: Option<PathBuf> = None;
    let mut trials = 10usize;
    let mut jobs = 1usize;
    let mut include_bicubic = true;
    let mut regs = vec![RegChoice::Tikhonov, RegChoice::Tv, RegChoice::Btv];
    let mut modes = vec![UpscalerMode::Ete, UpscalerMode::Interp];
    let mut opts = DegradeOpts::default();
    let mut solver = SolverOpts { knobs: SolverKnobs::default() };
    while let Some(flag) = cur.next() {
        match flag.as_str() {
            "--images" => images_dir = Some(PathBuf::from(cur.value(&flag)?)),
            "--out-csv" => out_csv = Some(PathBuf::from(cur.value(&flag)?)),
            "--trials" => trials = cur.parse(&flag)?,
            "--jobs" => jobs = cur.parse(&flag)?,
            "--no-bicubic" => include_bicubic = false,
            "--regs" => {
                let v = cur.value(&flag)?;
                regs = v
                    .split(',')
                    .map(|s| {
                        RegChoice::parse(s.trim())
                            .ok_or_else(|| UsageError(format!("--regs: unknown regularizer '{}'", s)))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
            }
            "--modes" => {
                let v = cur.value(&flag)?;
                modes = v
                    .split(',')
                    .map(|s| match s.trim() {
                        "ete" => Ok(UpscalerMode::Ete),
                        "interp" => Ok(UpscalerMode::Interp),
                        other => {
                            Err(UsageError(format!("--modes: expected ete|interp, got '{}'", other)))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
            }
            other => {
                if !opts.try_flag(other, cur)? && !solver.try_flag(other, cur)? {
                    return Err(UsageError(format!("bench: unknown flag '{}'", other)));
                }
            }
        }
    }
    let images_dir = images_dir.ok_or_else(|| UsageError("bench: --images is required".into()))?;
    Ok((|| {
        let mut images = Vec::new();
        for path in list_images(&images_dir)? {
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("image")
                .to_string();
            images.push(BenchImage { name, truth: load_luma(&path)? });
        }
        let spec = TrialSpec {
            images,
            params: opts.params()?,
            knobs: solver.knobs.clone(),
            regularizers: regs,
            modes,
            include_bicubic,
            trials,
            base_seed: opts.seed,
            jobs,
        };
        let report = run_bench(&spec)?;
        print!("{}", report.to_table());
        if let Some(p) = &out_csv {
            std::fs::write(p, report.to_csv())
                .map_err(|e| Error::Io(format!("{}: {}", p.display(), e)))?;
            println!("csv written to {}", p.display());
        }
        Ok(())
    })())
}

fn cmd_convergence(cur: &mut ArgCursor) -> Result<Result<(), Error>, UsageError> {
    let mut input: Option<PathBuf> = None;
    let mut out_prefix: Option<String> = None;
    let mut eta = CONVERGENCE_ETA;
    let mut lambda = CONVERGENCE_LAMBDA;
    let mut max_iter = CONVERGENCE_MAX_ITER;
    // trace runs compare convergence speed on clean data; noise is opt-in
    let mut opts = DegradeOpts { noise_sigma: 0.0, ..DegradeOpts::default() };
    while let Some(flag) = cur.next() {
        match flag.as_str() {
            "--input" => input = Some(PathBuf::from(cur.value(&flag)?)),
            "--out-prefix" => out_prefix = Some(cur.value(&flag)?),
            "--eta" => eta = cur.parse(&flag)?,
            "--lambda" => lambda = cur.parse(&flag)?,
            "--max-iter" => max_iter = cur.parse(&flag)?,
            other => {
                if !opts.try_flag(other, cur)? {
                    return Err(UsageError(format!("convergence: unknown flag '{}'", other)));
                }
            }
        }
    }
    let input = input.ok_or_else(|| UsageError("convergence: --input is required".into()))?;
    let out_prefix =
        out_prefix.ok_or_else(|| UsageError("convergence: --out-prefix is required".into()))?;
    Ok((|| {
        let truth = load_luma(&input)?;
        let params = opts.params()?;
        let (ete, interp) = run_convergence(&truth, &params, eta, lambda, max_iter, opts.seed)?;
        let ete_path = format!("{}_ete.csv", out_prefix);
        let interp_path = format!("{}_interp.csv", out_prefix);
        std::fs::write(&ete_path, ete.to_csv())
            .map_err(|e| Error::Io(format!("{}: {}", ete_path, e)))?;
        std::fs::write(&interp_path, interp.to_csv())
            .map_err(|e| Error::Io(format!("{}: {}", interp_path, e)))?;
        println!(
            "traces written: {} ({} iterations), {} ({} iterations)",
            ete_path,
            ete.len(),
            interp_path,
            interp.len()
        );
        Ok(())
    })())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut cur = ArgCursor { args, pos: 0 };
    let sub = match cur.next() {
        Some(s) => s,
        None => {
            eprint!("{}", USAGE);
            return ExitCode::from(1);
        }
    };
    let dispatched = match sub.as_str() {
        "degrade" => cmd_degrade(&mut cur),
        "reconstruct" => cmd_reconstruct(&mut cur),
        "bench" => cmd_bench(&mut cur),
        "convergence" => cmd_convergence(&mut cur),
        "--help" | "-h" | "help" => {
            print!("{}", USAGE);
            return ExitCode::SUCCESS;
        }
        other => {
            eprintln!("unknown subcommand '{}'\n", other);
            eprint!("{}", USAGE);
            return ExitCode::from(1);
        }
    };
    match dispatched {
        Err(UsageError(msg)) => {
            eprintln!("usage error: {}", msg);
            ExitCode::from(1)
        }
        Ok(Err(e)) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code_for(&e))
        }
        Ok(Ok(())) => ExitCode::SUCCESS,
    }
}
