//! JSON interchange formats.
//!
//! Exact values travel as strings — `"m*p^v"` scalars, `"num/den"` rational
//! coefficients, digit arrays with explicit starting exponents — never as
//! floats. A float rendering rides along in a clearly separate field for
//! human consumption and is ignored on input. Writers emit canonical forms
//! (compacted functions, sorted cells), so equal values serialize to
//! identical bytes.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cyclo::{CyclotomicNumber, ScaledAmplitude};
use crate::group::{GroupElement, UnitMatrix};
use crate::padic::{CosetRep, DigitLine, PVec, PadicRational};
use crate::step::StepFunction;
use crate::wavelet::{CoefficientMap, WaveletIndex};
use crate::{CoreError, Ctx, Result};

fn rational_str(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn parse_rational(text: &str) -> Result<BigRational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let numer: BigInt =
        num.parse().map_err(|_| CoreError::Parse(format!("bad numerator in {text:?}")))?;
    let denom: BigInt =
        den.parse().map_err(|_| CoreError::Parse(format!("bad denominator in {text:?}")))?;
    if denom == BigInt::from(0) {
        return Err(CoreError::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(numer, denom))
}

// ---------------------------------------------------------------------------
// digit lines

/// Digit array starting at exponent `start`: the value `Σ digits[i]·p^(start+i)`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DigitLineJson {
    pub start: i64,
    pub digits: Vec<u8>,
}

pub fn scalar_digits_to_json(x: &PadicRational, p: u64) -> DigitLineJson {
    let (start, digits) = x.digit_expansion(p);
    DigitLineJson { start, digits }
}

pub fn scalar_digits_from_json(line: &DigitLineJson, p: u64) -> Result<PadicRational> {
    if line.digits.iter().any(|&d| u64::from(d) >= p) {
        return Err(CoreError::Parse("digit out of range".into()));
    }
    Ok(PadicRational::from_digits(line.start, &line.digits, p))
}

pub fn coset_rep_to_json(n: &CosetRep) -> Vec<DigitLineJson> {
    n.lines()
        .iter()
        .map(|l| DigitLineJson { start: l.start(), digits: l.digits().to_vec() })
        .collect()
}

pub fn coset_rep_from_json(lines: &[DigitLineJson], ctx: &Ctx) -> Result<CosetRep> {
    if lines.len() != ctx.d() {
        return Err(CoreError::Parse("coset representative has wrong dimension".into()));
    }
    let parsed = lines
        .iter()
        .map(|l| DigitLine::from_parts(l.start, l.digits.clone(), ctx.p()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CosetRep::new(parsed))
}

// ---------------------------------------------------------------------------
// amplitudes

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CycloJson {
    pub conductor_exp: u32,
    pub coeffs: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmpJson {
    pub even: CycloJson,
    pub odd: CycloJson,
    /// Float rendering `[re, im]`; output only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub float: Option<[f64; 2]>,
}

fn cyclo_to_json(c: &CyclotomicNumber) -> CycloJson {
    CycloJson {
        conductor_exp: c.conductor_exp(),
        coeffs: c.coeffs().iter().map(rational_str).collect(),
    }
}

fn cyclo_from_json(j: &CycloJson, p: u64) -> Result<CyclotomicNumber> {
    let coeffs = j.coeffs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
    Ok(CyclotomicNumber::from_coeffs(j.conductor_exp, coeffs, p))
}

pub fn amp_to_json(a: &ScaledAmplitude, p: u64) -> AmpJson {
    let z = a.to_complex(p);
    AmpJson {
        even: cyclo_to_json(a.even()),
        odd: cyclo_to_json(a.odd()),
        float: Some([z.re, z.im]),
    }
}

pub fn amp_from_json(j: &AmpJson, p: u64) -> Result<ScaledAmplitude> {
    Ok(ScaledAmplitude::from_parts(cyclo_from_json(&j.even, p)?, cyclo_from_json(&j.odd, p)?))
}

// ---------------------------------------------------------------------------
// step functions

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellJson {
    pub rep: Vec<DigitLineJson>,
    pub amp: AmpJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionJson {
    pub p: u64,
    pub d: usize,
    pub scale: i64,
    pub cells: Vec<CellJson>,
}

/// Canonical serialization: the function is compacted and cells follow the
/// map order, so equal functions produce identical bytes.
pub fn function_to_json(f: &StepFunction) -> FunctionJson {
    let canonical = f.compact();
    let p = canonical.p();
    FunctionJson {
        p,
        d: canonical.d(),
        scale: canonical.scale(),
        cells: canonical
            .cells()
            .iter()
            .map(|(key, amp)| CellJson {
                rep: key.coords().iter().map(|c| scalar_digits_to_json(c, p)).collect(),
                amp: amp_to_json(amp, p),
            })
            .collect(),
    }
}

pub fn function_from_json(j: &FunctionJson) -> Result<(Ctx, StepFunction)> {
    let ctx = Ctx::new(j.p, j.d)?;
    let mut cells = Vec::with_capacity(j.cells.len());
    for cell in &j.cells {
        if cell.rep.len() != j.d {
            return Err(CoreError::Parse("cell representative has wrong dimension".into()));
        }
        let coords = cell
            .rep
            .iter()
            .map(|l| scalar_digits_from_json(l, j.p))
            .collect::<Result<Vec<_>>>()?;
        cells.push((PVec::new(coords), amp_from_json(&cell.amp, j.p)?));
    }
    Ok((ctx, StepFunction::from_cells(&ctx, j.scale, cells)))
}

// ---------------------------------------------------------------------------
// wavelet indices and coefficients

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndexJson {
    pub gamma: i64,
    pub n: Vec<DigitLineJson>,
    #[serde(rename = "J")]
    pub j: Vec<u8>,
}

pub fn index_to_json(idx: &WaveletIndex) -> IndexJson {
    IndexJson { gamma: idx.gamma(), n: coset_rep_to_json(idx.n()), j: idx.j().to_vec() }
}

pub fn index_from_json(j: &IndexJson, ctx: &Ctx) -> Result<WaveletIndex> {
    WaveletIndex::new(ctx, j.gamma, coset_rep_from_json(&j.n, ctx)?, j.j.clone())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoefficientEntryJson {
    pub gamma: i64,
    pub n: Vec<DigitLineJson>,
    #[serde(rename = "J")]
    pub j: Vec<u8>,
    pub amp: AmpJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParsevalJson {
    pub sum_sq: AmpJson,
    pub norm_sq: AmpJson,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoefficientsJson {
    pub p: u64,
    pub d: usize,
    pub coefficients: Vec<CoefficientEntryJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parseval: Option<ParsevalJson>,
}

pub fn coefficients_to_json(
    ctx: &Ctx,
    coeffs: &CoefficientMap,
    parseval: Option<ParsevalJson>,
) -> CoefficientsJson {
    CoefficientsJson {
        p: ctx.p(),
        d: ctx.d(),
        coefficients: coeffs
            .iter()
            .map(|(idx, amp)| CoefficientEntryJson {
                gamma: idx.gamma(),
                n: coset_rep_to_json(idx.n()),
                j: idx.j().to_vec(),
                amp: amp_to_json(amp, ctx.p()),
            })
            .collect(),
        parseval,
    }
}

pub fn coefficients_from_json(j: &CoefficientsJson) -> Result<(Ctx, CoefficientMap)> {
    let ctx = Ctx::new(j.p, j.d)?;
    let mut map = CoefficientMap::new();
    for entry in &j.coefficients {
        let idx = WaveletIndex::new(
            &ctx,
            entry.gamma,
            coset_rep_from_json(&entry.n, &ctx)?,
            entry.j.clone(),
        )?;
        map.insert(idx, amp_from_json(&entry.amp, j.p)?);
    }
    Ok((ctx, map))
}

// ---------------------------------------------------------------------------
// matrices and group words

pub type MatrixJson = Vec<Vec<String>>;

pub fn matrix_to_json(m: &UnitMatrix) -> MatrixJson {
    m.rows().iter().map(|row| row.iter().map(|e| e.to_string()).collect()).collect()
}

pub fn matrix_rows_from_json(rows: &MatrixJson, ctx: &Ctx) -> Result<Vec<Vec<PadicRational>>> {
    if rows.len() != ctx.d() || rows.iter().any(|r| r.len() != ctx.d()) {
        return Err(CoreError::Parse("matrix has wrong shape".into()));
    }
    rows.iter()
        .map(|row| row.iter().map(|s| PadicRational::parse(s, ctx.p())).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson, ctx: &Ctx) -> Result<UnitMatrix> {
    UnitMatrix::new(ctx, matrix_rows_from_json(rows, ctx)?)
}

pub fn pvec_to_json(x: &PVec) -> Vec<String> {
    x.coords().iter().map(|c| c.to_string()).collect()
}

pub fn pvec_from_json(coords: &[String], ctx: &Ctx) -> Result<PVec> {
    if coords.len() != ctx.d() {
        return Err(CoreError::Parse("vector has wrong dimension".into()));
    }
    Ok(PVec::new(
        coords
            .iter()
            .map(|s| PadicRational::parse(s, ctx.p()))
            .collect::<Result<Vec<_>>>()?,
    ))
}

/// One letter of a generator word.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WordAtomJson {
    Matrix { m: MatrixJson },
    Translate { b: Vec<String> },
    Dilate { gamma: i64 },
}

pub fn word_from_json(atoms: &[WordAtomJson], ctx: &Ctx) -> Result<Vec<GroupElement>> {
    atoms
        .iter()
        .map(|atom| match atom {
            WordAtomJson::Matrix { m } => {
                Ok(GroupElement::from_matrix(matrix_from_json(m, ctx)?))
            }
            WordAtomJson::Translate { b } => {
                Ok(GroupElement::from_translation(ctx, pvec_from_json(b, ctx)?))
            }
            WordAtomJson::Dilate { gamma } => Ok(GroupElement::from_dilation(ctx, *gamma)),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationJson {
    pub gamma: i64,
    pub b: Vec<String>,
    pub m: MatrixJson,
}

pub fn group_element_to_json(g: &GroupElement) -> FactorizationJson {
    FactorizationJson {
        gamma: g.gamma(),
        b: pvec_to_json(g.shift()),
        m: matrix_to_json(g.matrix()),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassificationJson {
    pub in_orbit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<IndexJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Ball;
    use crate::sample::Sampler;
    use crate::wavelet::{analyze, make_wavelet, synthesize};

    use crate::padic::CosetRep;

    #[test]
    fn function_roundtrip_is_exact_and_canonical() {
        let ctx = Ctx::new(3, 2).unwrap();
        let mut s = Sampler::new(&ctx, 5);
        for _ in 0..20 {
            let f = s.mean_zero_function();
            let j = function_to_json(&f);
            let text = serde_json::to_string_pretty(&j).unwrap();
            let parsed: FunctionJson = serde_json::from_str(&text).unwrap();
            let (ctx2, g) = function_from_json(&parsed).unwrap();
            assert_eq!(ctx2, ctx);
            assert_eq!(g, f);
            // canonical writer: serializing again gives identical bytes
            let text2 = serde_json::to_string_pretty(&function_to_json(&g)).unwrap();
            assert_eq!(text, text2);
        }
    }

    #[test]
    fn coefficient_roundtrip() {
        let ctx = Ctx::new(2, 1).unwrap();
        let mut s = Sampler::new(&ctx, 9);
        let f = s.mean_zero_function();
        let coeffs = analyze(&ctx, &f).unwrap();
        let j = coefficients_to_json(&ctx, &coeffs, None);
        let text = serde_json::to_string(&j).unwrap();
        let parsed: CoefficientsJson = serde_json::from_str(&text).unwrap();
        let (ctx2, back) = coefficients_from_json(&parsed).unwrap();
        assert_eq!(ctx2, ctx);
        assert_eq!(back, coeffs);
        assert_eq!(synthesize(&ctx, &back), f);
    }

    #[test]
    fn amplitude_strings_are_exact() {
        let ctx = Ctx::new(5, 1).unwrap();
        let mut s = Sampler::new(&ctx, 13);
        for _ in 0..30 {
            let a = s.amplitude();
            let j = amp_to_json(&a, 5);
            let back = amp_from_json(&j, 5).unwrap();
            assert_eq!(back, a);
        }
        assert!(parse_rational("1/0").is_err());
        assert_eq!(parse_rational("7").unwrap(), BigRational::from_integer(7.into()));
    }

    #[test]
    fn word_atoms_parse() {
        let ctx = Ctx::new(3, 2).unwrap();
        let text = r#"[
            {"kind": "dilate", "gamma": 1},
            {"kind": "translate", "b": ["1*p^-1", "0*p^0"]},
            {"kind": "matrix", "m": [["1*p^0", "0*p^0"], ["1*p^0", "1*p^0"]]}
        ]"#;
        let atoms: Vec<WordAtomJson> = serde_json::from_str(text).unwrap();
        let word = word_from_json(&atoms, &ctx).unwrap();
        assert_eq!(word.len(), 3);
        assert_eq!(word[0].gamma(), 1);

        // a non-unit matrix letter is rejected
        let bad = r#"[{"kind": "matrix", "m": [["3*p^0", "0*p^0"], ["0*p^0", "3*p^0"]]}]"#;
        let atoms: Vec<WordAtomJson> = serde_json::from_str(bad).unwrap();
        assert!(word_from_json(&atoms, &ctx).is_err());
    }

    #[test]
    fn malformed_digit_lines_are_rejected() {
        let ctx = Ctx::new(2, 1).unwrap();
        // leading zero digit
        let bad = vec![DigitLineJson { start: -2, digits: vec![0, 1] }];
        assert!(coset_rep_from_json(&bad, &ctx).is_err());
        // digit out of range
        let bad = vec![DigitLineJson { start: -1, digits: vec![2] }];
        assert!(coset_rep_from_json(&bad, &ctx).is_err());
        // length mismatch with the starting exponent
        let bad = vec![DigitLineJson { start: -3, digits: vec![1] }];
        assert!(coset_rep_from_json(&bad, &ctx).is_err());
    }

    #[test]
    fn indicator_serializes_compactly() {
        let ctx = Ctx::new(2, 1).unwrap();
        let om = StepFunction::indicator(&ctx, &Ball::unit(1));
        let refined = om.refine(3).unwrap();
        // the canonical writer compacts before emitting
        let a = serde_json::to_string(&function_to_json(&om)).unwrap();
        let b = serde_json::to_string(&function_to_json(&refined)).unwrap();
        assert_eq!(a, b);
        let wavelet = make_wavelet(
            &ctx,
            &crate::wavelet::WaveletIndex::new(&ctx, 0, CosetRep::zero(1), vec![1]).unwrap(),
        )
        .unwrap();
        let j = function_to_json(&wavelet);
        assert_eq!(j.cells.len(), 2);
    }
}
