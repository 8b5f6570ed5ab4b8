use std::fmt::Write as _;
use std::path::Path;

use super::runner::RoundRecord;
use crate::error::Result;

pub const HEADER: &str = "t,x,y,x_br,y_br,dgap_avg,nereg_avg,reg1_avg,reg2_avg,path,vt,eta,gamma,stage,doubled,weights";

fn join<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(";")
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Shortest round-trip decimals, `;` inside multi-valued fields, LF endings.
pub fn to_csv_string(records: &[RoundRecord]) -> String {
    let mut out = String::with_capacity(64 + records.len() * 200);
    out.push_str(HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            join(&r.x),
            join(&r.y),
            join(&r.x_br),
            join(&r.y_br),
            r.dgap_avg,
            opt(r.nereg_avg),
            r.reg1_avg,
            r.reg2_avg,
            r.path,
            opt(r.vt),
            r.eta,
            r.gamma,
            join(&r.stages),
            u8::from(r.doubled),
            r.weights.as_deref().map(join).unwrap_or_default(),
        );
    }
    out
}

pub fn write_csv(records: &[RoundRecord], path: &Path) -> Result<()> {
    std::fs::write(path, to_csv_string(records))?;
    Ok(())
}
