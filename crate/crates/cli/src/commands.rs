use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use gmforms_core::gm::{
    check_congruences, gm_norm, odd_primes_in, scan_exponents, GmNorm, Primality,
};
use gmforms_core::quadclass::{check_discriminant, group_structure, order};
use gmforms_core::repr::{represent as solve, Representation};
use gmforms_core::verifier::{run_suite, D2dAudit, MersenneRecord, SuiteSummary};
use gmforms_core::{serde_decimal, Error};

use crate::config::Config;
use crate::report::{opt, ReportEnvelope, Table};
use crate::Done;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_REFUTED: u8 = 3;

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn usage(e: Error) -> String {
    e.to_string()
}

fn check_exponent(cfg: &Config, p: u64) -> Result<(), String> {
    if p > cfg.p_cap {
        return Err(format!(
            "exponent {p} is above the configured cap {}",
            cfg.p_cap
        ));
    }
    Ok(())
}

fn abbreviate(n: &BigUint) -> String {
    let s = n.to_string();
    if s.len() <= 40 {
        s
    } else {
        format!("{}...{}", &s[..16], &s[s.len() - 16..])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub exponents_tested: u64,
    pub probable_primes: u64,
}

pub fn scan(cfg: &Config, pmin: u64, pmax: u64) -> Result<Done, String> {
    if pmin < 3 || pmin > pmax {
        return Err(format!(
            "need 3 <= pmin <= pmax, got pmin = {pmin}, pmax = {pmax}"
        ));
    }
    check_exponent(cfg, pmax)?;
    let start = Instant::now();
    eprintln!(
        "scan: p in {pmin}..={pmax} on {} workers",
        rayon::current_num_threads()
    );
    let tested = odd_primes_in(pmin, pmax).len() as u64;
    let hits: Vec<GmNorm> = scan_exponents(pmin, pmax).map_err(usage)?;
    eprintln!("scan: {} hits in {:.2?}", hits.len(), start.elapsed());

    let mut table = Table::new(&["p", "eps", "primality", "digits", "G_p"]);
    for g in &hits {
        table.row(vec![
            g.p.to_string(),
            format!("{:+}", g.epsilon),
            primality_name(g.primality).into(),
            g.value.to_string().len().to_string(),
            abbreviate(&g.value),
        ]);
    }
    let summary = ScanSummary {
        exponents_tested: tested,
        probable_primes: hits.len() as u64,
    };
    let text = format!(
        "{}\n{} of {} prime exponents give a probable prime G_p\n",
        table.render(),
        summary.probable_primes,
        summary.exponents_tested
    );
    let env = ReportEnvelope::new(
        "scan",
        params(&[("p_min", json!(pmin)), ("p_max", json!(pmax))]),
        hits,
        summary,
    );
    Ok(Done {
        json: env.to_json(),
        table: text,
        code: EXIT_OK,
    })
}

fn primality_name(p: Primality) -> &'static str {
    match p {
        Primality::ProvenSmall => "proven",
        Primality::ProbablePrime => "probable",
        Primality::Composite => "composite",
        Primality::Untested => "untested",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentRecord {
    pub p: u64,
    pub d: u64,
    #[serde(with = "serde_decimal")]
    pub n: BigUint,
    pub primality: Primality,
    pub representation: Option<Representation>,
    pub x_mod8: Option<u32>,
    pub y_mod8: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentSummary {
    pub solved: bool,
}

pub fn represent(cfg: &Config, p: u64, d: i64) -> Result<Done, String> {
    if d <= 0 {
        return Err(format!("d must be positive, got {d}"));
    }
    let d = d as u64;
    check_exponent(cfg, p)?;
    let g = gm_norm(p).map_err(usage)?;
    let rep = solve(&g.value, d).map_err(usage)?;
    let record = RepresentRecord {
        p,
        d,
        x_mod8: rep.as_ref().map(|r| r.x_mod(8)),
        y_mod8: rep.as_ref().map(|r| r.y_mod(8)),
        n: g.value,
        primality: g.primality,
        representation: rep,
    };
    let solved = record.representation.is_some();
    let text = match &record.representation {
        Some(r) => format!(
            "G_{p} = {} = x^2 + {d}*y^2\nx = {}\ny = {}\nx mod 8 = {}, y mod 8 = {}\n",
            record.n,
            r.x,
            r.y,
            r.x_mod(8),
            r.y_mod(8)
        ),
        None => format!(
            "G_{p} = {}\nnone: not of the form x^2 + {d}*y^2 with x, y > 0\n",
            record.n
        ),
    };
    let env = ReportEnvelope::new(
        "represent",
        params(&[("p", json!(p)), ("d", json!(d))]),
        vec![record],
        RepresentSummary { solved },
    );
    Ok(Done {
        json: env.to_json(),
        table: text,
        code: if solved { EXIT_OK } else { EXIT_NEGATIVE },
    })
}

pub fn verify(
    cfg: &Config,
    pmax: u64,
    ds: &[u64],
    generalized: bool,
    strict: bool,
) -> Result<Done, String> {
    if !generalized {
        if let Some(d) = ds.iter().find(|&&d| d != 7) {
            return Err(format!("d = {d} requires --generalized"));
        }
    }
    if pmax < 7 {
        return Err(format!("pmax must be at least 7, got {pmax}"));
    }
    check_exponent(cfg, pmax)?;
    let start = Instant::now();
    eprintln!(
        "verify: p <= {pmax}, d = {ds:?} on {} workers",
        rayon::current_num_threads()
    );
    let suite = run_suite(pmax, ds).map_err(usage)?;
    let s = &suite.summary;
    eprintln!(
        "verify: {} records in {:.2?}; {} confirmed, {} refuted",
        suite.records.len(),
        start.elapsed(),
        s.confirmed,
        s.refuted
    );

    let code = if s.refuted > 0 {
        EXIT_REFUTED
    } else if strict && s.unexpected_hypothesis_failures > 0 {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    };

    let mut records = Table::new(&["p", "d", "verdict", "x mod 8", "y mod 8", "artin", "flags"]);
    for r in &suite.records {
        let f = r.hypothesis_flags;
        let flags: String = [
            f.p_mod8_ok,
            f.gp_probable_prime,
            f.legendre_2_d,
            f.legendre_minus_d_gp,
            f.class_group_order4,
        ]
        .iter()
        .map(|&b| if b { '+' } else { '.' })
        .collect();
        records.row(vec![
            r.p.to_string(),
            r.d.to_string(),
            serde_json::to_value(r.verdict)
                .unwrap()
                .as_str()
                .unwrap()
                .to_string(),
            opt(r.x_mod8),
            opt(r.y_mod8),
            opt(r.artin_trivial.map(|t| if t { "trivial" } else { "rho" })),
            flags,
        ]);
    }
    let mut d2d = Table::new(&["p", "d", "rep d", "rep 2d", "equivalent"]);
    for a in &suite.d2d {
        d2d.row(vec![
            a.p.to_string(),
            a.d.to_string(),
            a.rep_d.to_string(),
            a.rep_2d.to_string(),
            a.equivalent.to_string(),
        ]);
    }
    let mut mersenne = Table::new(&["p", "x mod 8", "y mod 8", "artin", "pattern"]);
    for m in &suite.mersenne {
        mersenne.row(vec![
            m.p.to_string(),
            m.x_mod8.to_string(),
            m.y_mod8.to_string(),
            if m.artin_trivial { "trivial" } else { "rho" }.into(),
            if m.pattern_holds() { "holds" } else { "fails" }.into(),
        ]);
    }
    let text = format!(
        "flags: p = +-1 mod 8, G_p prime, (2/d) = 1, (-d/G_p) = 1, order-4 class\n\n{}\n\
         d vs 2d\n{}\nMersenne control\n{}\n{}",
        records.render(),
        d2d.render(),
        mersenne.render(),
        summary_text(s)
    );

    let mut env = ReportEnvelope::new(
        "verify",
        params(&[
            ("p_max", json!(pmax)),
            ("d", json!(suite.d_list)),
            ("generalized", json!(generalized)),
            ("strict", json!(strict)),
        ]),
        suite.records,
        suite.summary.clone(),
    );
    env.auxiliary = Some(
        serde_json::to_value(VerifyAuxiliary {
            d2d: suite.d2d,
            mersenne: suite.mersenne,
        })
        .unwrap(),
    );
    Ok(Done {
        json: env.to_json(),
        table: text,
        code,
    })
}

/// Side tables attached to a `verify` report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyAuxiliary {
    pub d2d: Vec<D2dAudit>,
    pub mersenne: Vec<MersenneRecord>,
}

fn summary_text(s: &SuiteSummary) -> String {
    format!(
        "confirmed {}\nhypothesis_not_met {}\nno_representation {}\nout_of_range {}\nrefuted {}\n\
         unexpected_hypothesis_failures {}\nd2d_disagreements {}\nmersenne_pattern_failures {}\n",
        s.confirmed,
        s.hypothesis_not_met,
        s.no_representation,
        s.out_of_range,
        s.refuted,
        s.unexpected_hypothesis_failures,
        s.d2d_disagreements,
        s.mersenne_pattern_failures
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupBrief {
    pub h: u64,
    pub has_order_4_element: bool,
}

pub fn classgroup(disc: i64) -> Result<Done, String> {
    check_discriminant(disc).map_err(usage)?;
    let g = group_structure(disc).map_err(usage)?;
    let mut table = Table::new(&["a", "b", "c", "order"]);
    for f in &g.forms {
        table.row(vec![
            f.a.to_string(),
            f.b.to_string(),
            f.c.to_string(),
            order(f).map_err(usage)?.to_string(),
        ]);
    }
    let text = format!(
        "D = {}\nh = {}\ncyclic orders {:?}\norder-4 element: {}\n\n{}",
        g.discriminant,
        g.h,
        g.cyclic_orders,
        if g.has_order_4_element { "yes" } else { "no" },
        table.render()
    );
    let brief = ClassGroupBrief {
        h: g.h,
        has_order_4_element: g.has_order_4_element,
    };
    let env = ReportEnvelope::new(
        "classgroup",
        params(&[("discriminant", json!(disc))]),
        vec![g],
        brief,
    );
    Ok(Done {
        json: env.to_json(),
        table: text,
        code: EXIT_OK,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceSummary {
    pub holds: bool,
}

pub fn congruences(cfg: &Config, p: u64) -> Result<Done, String> {
    check_exponent(cfg, p)?;
    let c = check_congruences(p).map_err(usage)?;
    let pr = &c.prediction;
    let mut table = Table::new(&["modulus", "actual", "predicted", "applies"]);
    for (m, actual, predicted, applies) in [
        (8, c.actual_mod8, pr.mod8, pr.applicable.mod8),
        (16, c.actual_mod16, pr.mod16, pr.applicable.mod16),
        (32, c.actual_mod32, pr.mod32, pr.applicable.mod32),
        (7, c.actual_mod7, pr.mod7, pr.applicable.mod7),
    ] {
        table.row(vec![
            m.to_string(),
            actual.to_string(),
            opt(predicted),
            if applies { "yes" } else { "no" }.into(),
        ]);
    }
    let holds = c.holds;
    let text = format!(
        "p = {p}\n{}\n{}\n",
        table.render(),
        if holds {
            "all applicable predictions hold"
        } else {
            "PREDICTION VIOLATED"
        }
    );
    let env = ReportEnvelope::new(
        "congruences",
        params(&[("p", json!(p))]),
        vec![c],
        CongruenceSummary { holds },
    );
    Ok(Done {
        json: env.to_json(),
        table: text,
        code: if holds { EXIT_OK } else { EXIT_REFUTED },
    })
}
