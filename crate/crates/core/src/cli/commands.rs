use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::Instant;

use serde::Serialize;

use super::{Cli, Command, DiscArgs, ExportFormat, SeqCommand};
use crate::discrepancy::{
    box_dim_boundary, decay_fit, measure, theorem_exponent, BoxDimOptions, DiscrepancyReport,
};
use crate::error::{Error, Result};
use crate::export::{write_cloud_csv, write_cloud_ppm};
use crate::numeration::MBonacciSystem;
use crate::rauzy::build_cloud;
use crate::report::{format_fixed, read_points_csv, JsonReport};
use crate::rotation::{halton_points, local_discrepancy, vdc, HaltonConfig};
use crate::verify::{self, Depth};

/// Boundary dimension of the order-3 fractal quoted for the worked example.
const TRIBONACCI_BOUNDARY_DIM: f64 = 1.09336;

pub(super) fn run(cli: Cli) -> Result<i32> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::InvalidArgument("--threads must be positive".into()));
        }
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    let mut out: Box<dyn Write> = match &cli.output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let code = dispatch(cli.command, &mut out)?;
    out.flush()?;
    Ok(code)
}

fn system(m: u64, max_n: u64) -> Result<MBonacciSystem> {
    MBonacciSystem::with_max(m as usize, max_n.max(1))
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Expand { m, n } => expand(m, n, out)?,
        Command::Seq(SeqCommand::Vdc { m, count, digits }) => {
            let sys = system(m, count - 1)?;
            writeln!(out, "n,value")?;
            for n in 0..count {
                writeln!(out, "{n},{}", format_fixed(vdc(&sys, n)?, digits))?;
            }
        }
        Command::Seq(SeqCommand::Halton { ms, count, digits }) => {
            let cfg = HaltonConfig::from_orders(&ms, (count - 1).max(1))?;
            let pts = halton_points(&cfg, count as usize)?;
            let header: Vec<String> = (1..=ms.len()).map(|i| format!("x{i}")).collect();
            writeln!(out, "n,{}", header.join(","))?;
            for (n, p) in pts.iter().enumerate() {
                let row: Vec<String> = p.iter().map(|&x| format_fixed(x, digits)).collect();
                writeln!(out, "{n},{}", row.join(","))?;
            }
        }
        Command::Fractal {
            m,
            depth,
            format,
            digits,
            size,
        } => {
            let sys = system(m, depth as u64)?;
            let cloud = build_cloud(&sys, depth)?;
            match format {
                ExportFormat::Csv => write_cloud_csv(&cloud, digits, &mut *out)?,
                ExportFormat::Ppm => write_cloud_ppm(&cloud, size, &mut *out)?,
            }
        }
        Command::Disc(args) => disc(args, out)?,
        Command::Dim {
            m,
            depth,
            levels,
            no_timing,
        } => {
            let start = Instant::now();
            let levels = parse_levels(&levels)?;
            let sys = system(m, depth as u64)?;
            let cloud = build_cloud(&sys, depth)?;
            let est = box_dim_boundary(&cloud, &levels, BoxDimOptions::default())?;
            let secs = if no_timing {
                0.0
            } else {
                start.elapsed().as_secs_f64()
            };
            let report = JsonReport::from_dimension(&est, cloud.len(), cloud.dim(), secs);
            writeln!(out, "{}", report.to_json())?;
        }
        Command::Exponent { ms, dims } => {
            writeln!(out, "{:.6}", theorem_exponent(&ms, &dims)?)?;
        }
        Command::LocalDisc { m, k, count } => {
            #[derive(Serialize)]
            struct Record {
                k: usize,
                #[serde(rename = "N")]
                n: u64,
                delta: f64,
            }
            let sys = system(m, count - 1)?;
            let delta = local_discrepancy(&sys, k, count)?;
            let rec = Record { k, n: count, delta };
            writeln!(
                out,
                "{}",
                serde_json::to_string(&rec).expect("record serializes")
            )?;
        }
        Command::Verify { quick, full } => {
            let depth = if full && !quick {
                Depth::Full
            } else {
                Depth::Quick
            };
            let outcomes = verify::run(depth);
            write!(out, "{}", verify::render(&outcomes))?;
            if outcomes.iter().any(|o| !o.passed) {
                return Ok(1);
            }
        }
        Command::ReproduceExample { max_power } => reproduce(max_power, out)?,
    }
    Ok(0)
}

fn expand(m: u64, n: u64, out: &mut dyn Write) -> Result<()> {
    let sys = system(m, n)?;
    let e = sys.encode(n)?;
    let back = sys.decode(&e)?;
    writeln!(out, "digits: {}", e.to_msb_string())?;
    let terms: Vec<usize> = (0..e.len()).rev().filter(|&j| e.digits()[j] == 1).collect();
    if terms.is_empty() {
        writeln!(out, "{n} = 0")?;
    } else {
        let names: Vec<String> = terms.iter().map(|j| format!("F_{j}")).collect();
        let values: Vec<String> = terms.iter().map(|&j| sys.basis()[j].to_string()).collect();
        writeln!(out, "{n} = {} = {}", names.join(" + "), values.join(" + "))?;
    }
    writeln!(out, "decoded: {back}")?;
    Ok(())
}

fn parse_levels(s: &str) -> Result<Vec<u32>> {
    let bad = || Error::InvalidArgument(format!("cannot read levels {s:?}"));
    if let Some((lo, hi)) = s.split_once('-') {
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        Ok((lo..=hi).collect())
    } else {
        s.split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect()
    }
}

fn disc(args: DiscArgs, out: &mut dyn Write) -> Result<()> {
    let start = Instant::now();
    let points = match (&args.input, &args.ms) {
        (Some(path), _) => read_points_csv(File::open(path)?)?,
        (None, Some(ms)) => {
            let count = args.count.expect("clap enforces --count with --ms");
            let cfg = HaltonConfig::from_orders(ms, (count - 1).max(1))?;
            halton_points(&cfg, count as usize)?
        }
        (None, None) => {
            return Err(Error::InvalidArgument(
                "give --input or --ms with --count".into(),
            ))
        }
    };
    let s = points[0].len();
    let secs = |r: &mut DiscrepancyReport| {
        if args.no_timing {
            r.runtime_seconds = 0.0;
        }
    };
    let report = match &args.sweep {
        None => {
            let mut r = measure(&points, s, args.budget)?;
            secs(&mut r);
            JsonReport::from_discrepancy(&r)
        }
        Some(sizes) => {
            let mut samples = Vec::with_capacity(sizes.len());
            let mut last = None;
            for &n in sizes {
                if n == 0 || n > points.len() {
                    return Err(Error::InvalidArgument(format!(
                        "sweep size {n} outside 1..={}",
                        points.len()
                    )));
                }
                let r = measure(&points[..n], s, args.budget)?;
                samples.push((n as f64, r.value));
                last = Some(r);
            }
            let fit = decay_fit(&samples)?;
            let mut last = last.expect("decay_fit needs samples");
            secs(&mut last);
            let wall = if args.no_timing {
                0.0
            } else {
                start.elapsed().as_secs_f64()
            };
            JsonReport::from_fit(&last, &fit, wall)
        }
    };
    writeln!(out, "{}", report.to_json())?;
    Ok(())
}

fn reproduce(max_power: u32, out: &mut dyn Write) -> Result<()> {
    let predicted = theorem_exponent(&[2, 3], &[0.0, TRIBONACCI_BOUNDARY_DIM])?;
    writeln!(
        out,
        "theorem exponent for (m1, m2) = (2, 3), d = (0, {TRIBONACCI_BOUNDARY_DIM}): {predicted:.6}"
    )?;

    let sys3 = system(3, 1_000_000)?;
    let est = box_dim_boundary(
        &build_cloud(&sys3, 1_000_000)?,
        &(4..=9).collect::<Vec<_>>(),
        BoxDimOptions::default(),
    )?;
    let measured = theorem_exponent(&[2, 3], &[0.0, est.slope])?;
    writeln!(
        out,
        "measured boundary dimension (m = 3, levels 4-9): {:.4} +/- {:.4}, exponent {measured:.6}",
        est.slope, est.stderr
    )?;

    let top = 1usize << max_power;
    let cfg = HaltonConfig::from_orders(&[2, 3], top as u64)?;
    let pts = halton_points(&cfg, top)?;
    let mut samples = Vec::new();
    for p in 8..=max_power {
        let n = 1usize << p;
        let r = measure(&pts[..n], 2, crate::discrepancy::DEFAULT_CORNER_BUDGET)?;
        writeln!(
            out,
            "N = {n:>6}  D*_N = {:.6}  ({})",
            r.value,
            r.method.as_str()
        )?;
        samples.push((n as f64, r.value));
    }
    let fit = decay_fit(&samples)?;
    writeln!(
        out,
        "measured Halton decay slope over N = 2^8..2^{max_power}: {:.4} (r2 {:.3}), bound {predicted:.6}",
        fit.exponent, fit.r2
    )?;
    Ok(())
}
