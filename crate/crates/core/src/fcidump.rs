//! FCIDUMP reader and normalized writer.
//!
//! Integrals are stored in chemist notation `(pq|rs)` under canonical
//! permutation keys (1-based, as in the file). Two-body keys use the 8-fold
//! symmetry of real orbitals; one-body keys the 2-fold symmetry.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FcidumpData {
    pub n_spatial: usize,
    pub n_electrons: usize,
    pub ms2: i64,
    pub core_energy: f64,
    pub one_body: BTreeMap<(usize, usize), f64>,
    pub two_body: BTreeMap<(usize, usize, usize, usize), f64>,
    /// Parsed and carried along; not interpreted.
    pub orbsym: Vec<i64>,
    /// Largest disagreement seen between permutation-equivalent entries.
    pub symmetry_violation: f64,
}

fn pair_key(i: usize, j: usize) -> (usize, usize) {
    if i >= j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Canonical 8-fold key for `(ij|kl)`.
pub fn canonical_two_body(i: usize, j: usize, k: usize, l: usize) -> (usize, usize, usize, usize) {
    let a = pair_key(i, j);
    let b = pair_key(k, l);
    if a >= b {
        (a.0, a.1, b.0, b.1)
    } else {
        (b.0, b.1, a.0, a.1)
    }
}

impl FcidumpData {
    /// One-body integral, 0-based spatial indices.
    pub fn h1(&self, p: usize, q: usize) -> f64 {
        self.one_body
            .get(&pair_key(p + 1, q + 1))
            .copied()
            .unwrap_or(0.0)
    }

    /// Chemist-notation two-body integral `(pq|rs)`, 0-based spatial indices.
    pub fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two_body
            .get(&canonical_two_body(p + 1, q + 1, r + 1, s + 1))
            .copied()
            .unwrap_or(0.0)
    }

    fn insert_checked<K: Ord>(map: &mut BTreeMap<K, f64>, key: K, value: f64, violation: &mut f64) {
        match map.get(&key) {
            Some(&old) => *violation = violation.max((old - value).abs()),
            None => {
                map.insert(key, value);
            }
        }
    }
}

fn parse_float(tok: &str, line: usize) -> Result<f64> {
    let normalized = tok.replace(['D', 'd'], "E");
    normalized.parse::<f64>().map_err(|_| Error::Parse {
        line,
        msg: format!("not a number: {tok:?}"),
    })
}

fn parse_index(tok: &str, line: usize, norb: usize) -> Result<usize> {
    let v: usize = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("not an orbital index: {tok:?}"),
    })?;
    if v > norb {
        return Err(Error::Parse {
            line,
            msg: format!("orbital index {v} exceeds NORB = {norb}"),
        });
    }
    Ok(v)
}

/// Parses the `&FCI … &END` namelist into `key → values`.
fn parse_header(text: &str, line: usize) -> Result<BTreeMap<String, Vec<String>>> {
    let body = text.trim_start();
    let body = body
        .strip_prefix("&FCI")
        .or_else(|| body.strip_prefix("&fci"))
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing &FCI header".into(),
        })?;
    let mut fields: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for tok in body.split(|c: char| c == ',' || c.is_whitespace()) {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        if let Some((k, v)) = tok.split_once('=') {
            let k = k.trim().to_ascii_uppercase();
            let entry = fields.entry(k.clone()).or_default();
            if !v.trim().is_empty() {
                entry.push(v.trim().to_string());
            }
            current = Some(k);
        } else if let Some(k) = &current {
            fields.get_mut(k).expect("current key exists").push(tok.to_string());
        } else {
            return Err(Error::Parse {
                line,
                msg: format!("unexpected header token {tok:?}"),
            });
        }
    }
    Ok(fields)
}

fn header_int(fields: &BTreeMap<String, Vec<String>>, key: &str, line: usize) -> Result<Option<i64>> {
    match fields.get(key).and_then(|v| v.first()) {
        None => Ok(None),
        Some(s) => s.parse::<i64>().map(Some).map_err(|_| Error::Parse {
            line,
            msg: format!("{key} is not an integer: {s:?}"),
        }),
    }
}

pub fn parse_fcidump(text: &str) -> Result<FcidumpData> {
    let lines: Vec<&str> = text.lines().collect();
    let end = lines
        .iter()
        .position(|l| {
            let t = l.trim().to_ascii_uppercase();
            t == "&END" || t == "/" || t.ends_with("&END") || t == "$END"
        })
        .ok_or_else(|| Error::Parse {
            line: lines.len().max(1),
            msg: "header is not terminated by &END or /".into(),
        })?;
    let mut header = lines[..=end].join(" ");
    if let Some(pos) = header.to_ascii_uppercase().rfind("&END") {
        header.truncate(pos);
    } else if let Some(pos) = header.rfind('/') {
        header.truncate(pos);
    }
    let fields = parse_header(&header, end + 1)?;
    let norb = header_int(&fields, "NORB", 1)?.ok_or_else(|| Error::Parse {
        line: 1,
        msg: "NORB missing from header".into(),
    })?;
    let nelec = header_int(&fields, "NELEC", 1)?.ok_or_else(|| Error::Parse {
        line: 1,
        msg: "NELEC missing from header".into(),
    })?;
    if norb <= 0 || nelec < 0 || nelec > 2 * norb {
        return Err(Error::Parse {
            line: 1,
            msg: format!("inconsistent header NORB = {norb}, NELEC = {nelec}"),
        });
    }
    let ms2 = header_int(&fields, "MS2", 1)?.unwrap_or(0);
    let orbsym = fields
        .get("ORBSYM")
        .map(|v| v.iter().filter_map(|s| s.parse::<i64>().ok()).collect())
        .unwrap_or_default();
    let norb = norb as usize;

    let mut data = FcidumpData {
        n_spatial: norb,
        n_electrons: nelec as usize,
        ms2,
        orbsym,
        ..Default::default()
    };
    for (offset, raw) in lines[end + 1..].iter().enumerate() {
        let line = end + 2 + offset;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 'value i j k l', found {} fields", toks.len()),
            });
        }
        let value = parse_float(toks[0], line)?;
        let i = parse_index(toks[1], line, norb)?;
        let j = parse_index(toks[2], line, norb)?;
        let k = parse_index(toks[3], line, norb)?;
        let l = parse_index(toks[4], line, norb)?;
        match (i, j, k, l) {
            (0, 0, 0, 0) => data.core_energy += value,
            (i, j, 0, 0) if i > 0 && j > 0 => FcidumpData::insert_checked(
                &mut data.one_body,
                pair_key(i, j),
                value,
                &mut data.symmetry_violation,
            ),
            // orbital energies
            (i, 0, 0, 0) if i > 0 => {}
            (i, j, k, l) if i > 0 && j > 0 && k > 0 && l > 0 => FcidumpData::insert_checked(
                &mut data.two_body,
                canonical_two_body(i, j, k, l),
                value,
                &mut data.symmetry_violation,
            ),
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unrecognized index pattern {i} {j} {k} {l}"),
                })
            }
        }
    }
    Ok(data)
}

/// Normalized re-emission: canonical keys only, full round-trip precision.
pub fn write_fcidump(data: &FcidumpData) -> String {
    let mut s = String::new();
    let orbsym = if data.orbsym.len() == data.n_spatial {
        data.orbsym.clone()
    } else {
        vec![1; data.n_spatial]
    };
    let orbsym: Vec<String> = orbsym.iter().map(|o| o.to_string()).collect();
    let _ = writeln!(
        s,
        " &FCI NORB={},NELEC={},MS2={},\n  ORBSYM={},\n  ISYM=1,\n &END",
        data.n_spatial,
        data.n_electrons,
        data.ms2,
        orbsym.join(",")
    );
    for (&(i, j, k, l), v) in &data.two_body {
        let _ = writeln!(s, "{v:>25.16e} {i:4} {j:4} {k:4} {l:4}");
    }
    for (&(i, j), v) in &data.one_body {
        let _ = writeln!(s, "{v:>25.16e} {i:4} {j:4} {:4} {:4}", 0, 0);
    }
    let _ = writeln!(s, "{:>25.16e} {:4} {:4} {:4} {:4}", data.core_energy, 0, 0, 0, 0);
    s
}
