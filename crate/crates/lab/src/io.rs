//! File formats: JSON lines for records, CSV for fields, laws, paths,
//! histograms and scan tables. Floats are written with 17 significant digits.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::path::Path;

use anyhow::{bail, Context};
use pamlab_core::scenario::SwitchReport;
use pamlab_core::{EndpointLaw, FieldRealization, LatticeSite, PathSample};
use serde::Serialize;

use crate::experiments::TrialRecord;
use crate::format::fmt17;

pub fn write_json_line<T: Serialize, W: Write>(out: &mut W, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")
}

pub fn write_jsonl<T: Serialize, W: Write>(out: &mut W, values: &[T]) -> io::Result<()> {
    for v in values {
        write_json_line(out, v)?;
    }
    Ok(())
}

pub fn read_records<R: BufRead>(input: R) -> anyhow::Result<Vec<TrialRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("record on line {}", i + 1))?);
    }
    Ok(out)
}

fn coord_header(d: usize) -> &'static str {
    ["x", "x,y", "x,y,z"][d - 1]
}

fn coords(s: &LatticeSite) -> String {
    s.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

/// `x[,y[,z]],xi,psi` over `B_N`, in ball order.
pub fn write_field_csv<W: Write>(out: &mut W, field: &FieldRealization, n: usize) -> io::Result<()> {
    writeln!(out, "{},xi,psi", coord_header(field.dim()))?;
    let psi = field.psi(n);
    for (k, (xi, p)) in field.xi_within(n).iter().zip(&psi).enumerate() {
        writeln!(out, "{},{},{}", coords(&field.ball().site(k)), fmt17(*xi), fmt17(*p))?;
    }
    Ok(())
}

/// `x[,y[,z]],log_p,p` over `B_N`.
pub fn write_law_csv<W: Write>(out: &mut W, law: &EndpointLaw) -> io::Result<()> {
    writeln!(out, "{},log_p,p", coord_header(law.ball().dim()))?;
    for (k, lp) in law.log_p().iter().enumerate() {
        writeln!(out, "{},{},{}", coords(&law.ball().site(k)), fmt17(*lp), fmt17(lp.exp()))?;
    }
    Ok(())
}

/// `step,x[,y[,z]]` for `S_0..S_N`.
pub fn write_path_csv<W: Write>(out: &mut W, path: &PathSample) -> io::Result<()> {
    let d = path.site(0).dim();
    writeln!(out, "step,{}", coord_header(d))?;
    for (i, s) in path.steps().iter().enumerate() {
        writeln!(out, "{},{}", i, coords(s))?;
    }
    Ok(())
}

pub fn write_histogram_csv<W: Write>(out: &mut W, bins: &[(f64, f64, u64)]) -> io::Result<()> {
    writeln!(out, "bin_left,bin_right,count")?;
    for (l, r, c) in bins {
        writeln!(out, "{},{},{}", fmt17(*l), fmt17(*r), c)?;
    }
    Ok(())
}

/// Flat table of the scalar record fields.
pub fn write_records_csv<W: Write>(out: &mut W, records: &[TrialRecord]) -> io::Result<()> {
    writeln!(
        out,
        "trial,seed,alpha,d,N,p_w,p_z1,p_z2,two_point_mass,w,z1,z2,w_over_N,w_equals_z1,w_in_top_two,\
         ties_detected,log_u,x12,z12,n_times_z12,comparator_agrees,event_C_estimate"
    )?;
    let join = |v: &[i32]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.trial,
            r.seed,
            fmt17(r.alpha),
            r.d,
            r.n,
            fmt17(r.p_w),
            fmt17(r.p_z1),
            fmt17(r.p_z2),
            fmt17(r.two_point_mass),
            join(&r.w),
            join(&r.z1),
            join(&r.z2),
            r.w_over_n.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(";"),
            r.w_equals_z1,
            r.w_in_top_two,
            r.ties_detected,
            fmt17(r.log_u),
            fmt17(r.gap_stats.x12),
            fmt17(r.gap_stats.z12),
            fmt17(r.gap_stats.n_times_z12),
            r.comparator_agrees.map_or(String::new(), |b| b.to_string()),
            r.event_c_estimate.as_ref().map_or(String::new(), |e| fmt17(e.estimate)),
        )?;
    }
    Ok(())
}

/// `N,psi_gap,scaled_gap,w,z1,z2,p_w` for every scanned time.
pub fn write_scan_csv<W: Write>(out: &mut W, report: &SwitchReport) -> io::Result<()> {
    writeln!(out, "N,psi_gap,scaled_gap,w,z1,z2,p_w")?;
    for r in &report.scan {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            fmt17(r.psi_gap),
            fmt17(r.scaled_gap),
            r.w.x(),
            r.z1.x(),
            r.z2.x(),
            fmt17(r.p_w)
        )?;
    }
    Ok(())
}

/// Parses `key = value` lines; `#` starts a comment. Keys must be unique.
pub fn parse_flat_config(text: &str) -> anyhow::Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", i + 1);
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            bail!("config line {}: duplicate key `{}`", i + 1, k);
        }
    }
    Ok(map)
}

pub fn read_flat_config(path: &Path) -> anyhow::Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_flat_config(&text)
}
