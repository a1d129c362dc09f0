//! CSV writers. Each row starts with a `schema` column naming the table and
//! its version; infinite values are written as `inf`.

use std::io::Write;

use crate::frr::FrrTrial;
use crate::multigs::MultiGsSetting;
use crate::validation::ValidationRecord;
use crate::Result;

pub const FRR_SCHEMA: &str = "frr/1";
pub const VALIDATION_SCHEMA: &str = "validation/1";
pub const MULTIGS_SCHEMA: &str = "multigs/1";

pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x.is_nan() {
        String::new()
    } else {
        format!("{x}")
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn snake<T: serde::Serialize>(x: &T) -> String {
    match serde_json::to_value(x) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(v) => v.to_string(),
        Err(_) => String::new(),
    }
}

pub fn write_frr(out: impl Write, trials: &[FrrTrial]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "schema",
        "trial",
        "event",
        "src",
        "dst",
        "failure_time_s",
        "send_time_s",
        "failures",
        "header_tags",
        "scheme",
        "delivered",
        "delay_s",
        "delay_stretch_pct",
        "hops",
        "hop_stretch",
        "reroutes",
        "drop_reason",
    ])?;
    for t in trials {
        let failures = t.failures.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(";");
        for r in &t.results {
            w.write_record([
                FRR_SCHEMA.to_string(),
                t.trial.to_string(),
                t.event.to_string(),
                t.src.to_string(),
                t.dst.to_string(),
                fmt_f64(t.failure_time_s),
                fmt_f64(t.send_time_s),
                failures.clone(),
                t.header_tags.to_string(),
                r.scheme.name().to_string(),
                r.delivered.to_string(),
                fmt_f64(r.delay_s),
                fmt_f64(r.delay_stretch_pct),
                opt(r.hops),
                opt(r.hop_stretch),
                r.reroutes.to_string(),
                r.drop_reason.clone().unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_validation(out: impl Write, records: &[ValidationRecord], thresholds: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = [
        "schema",
        "trial",
        "class",
        "variant",
        "src_gs",
        "dst_gs",
        "ingress",
        "egress",
        "time_s",
        "tag_count",
        "hops",
        "passed",
        "failed_check",
        "inversions",
        "inversion_steps",
        "excess",
        "r_min",
        "c_min",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(thresholds.iter().map(|p| format!("threshold_{p}pct_pass")));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            VALIDATION_SCHEMA.to_string(),
            r.trial.to_string(),
            r.class.name().to_string(),
            r.variant.map(|v| snake(&v)).unwrap_or_default(),
            r.src_gs.to_string(),
            r.dst_gs.to_string(),
            r.ingress.to_string(),
            r.egress.to_string(),
            fmt_f64(r.time_s),
            r.tag_count.to_string(),
            r.hops.to_string(),
            r.passed.to_string(),
            r.failed_check.map(|c| snake(&c)).unwrap_or_default(),
            r.inversions.to_string(),
            r.inversion_steps.to_string(),
            r.excess.to_string(),
            r.r_min.to_string(),
            r.c_min.to_string(),
        ];
        row.extend(r.threshold_pass.iter().map(|b| b.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_multigs(out: impl Write, settings: &[MultiGsSetting]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "schema",
        "botnet_size",
        "setting",
        "time_s",
        "target",
        "active_pairs",
        "usable_pairs",
        "usable_fraction",
        "critical_satellites",
    ])?;
    for s in settings {
        w.write_record([
            MULTIGS_SCHEMA.to_string(),
            s.botnet_size.to_string(),
            s.setting.to_string(),
            fmt_f64(s.time_s),
            s.target.to_string(),
            s.active_pairs.to_string(),
            s.usable_pairs.to_string(),
            fmt_f64(s.usable_fraction),
            fmt_f64(s.critical_satellites),
        ])?;
    }
    w.flush()?;
    Ok(())
}
