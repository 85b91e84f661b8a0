//! `K` for a kernel family restricted to a spatial part, the half-line
//! variants `K_±` and the local difference operators with their pieces.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::kernels::{BesselPiece, KernelSetting};
use crate::quad::Domain;

use super::apply::{apply_k, DEFAULT_DELTA_STEPS};
use super::table::{EntryMask, KernelFamily, KernelTable, Region};

/// Which entries `(x, y)` of a kernel are kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Part {
    All,
    Local(Region),
    Global(Region),
}

impl Part {
    fn mask(&self, f: &SampledField, cols: Range<usize>) -> Option<EntryMask> {
        let space = f.grid().space();
        match *self {
            Part::All => None,
            Part::Local(r) => Some(EntryMask::from_region(r, space, cols)),
            Part::Global(r) => Some(EntryMask::from_region(r, space, cols).complement()),
        }
    }
}

/// Spatial columns carrying the support of `f`.
pub fn support_columns(f: &SampledField) -> Result<Range<usize>> {
    f.spatial_support()
        .ok_or_else(|| Error::precondition("support_columns", "field vanishes identically"))
}

/// Kernel table of `family` on `part`, laid out for `f`.
pub fn table_for(family: KernelFamily, part: Part, f: &SampledField) -> Result<KernelTable> {
    let cols = support_columns(f)?;
    let mask = part.mask(f, cols.clone());
    let g = f.grid();
    KernelTable::build(
        family,
        g.space(),
        cols,
        g.dt(),
        g.nt().saturating_sub(1).max(1),
        mask.as_ref(),
    )
}

/// `Σ c·K_family` over `terms = [(family, c)]`, restricted to `part`.
pub fn apply_terms(
    terms: &[(KernelFamily, f64)],
    part: Part,
    f: &SampledField,
) -> Result<SampledField> {
    let mut table: Option<KernelTable> = None;
    for &(family, c) in terms {
        let t = table_for(family, part, f)?;
        table = Some(match table {
            None => t.combine(c, &t, 0.0)?,
            Some(acc) => acc.combine(1.0, &t, c)?,
        });
    }
    let table = table.ok_or_else(|| Error::precondition("apply_terms", "no terms"))?;
    apply_k(&table, f, DEFAULT_DELTA_STEPS)
}

/// `K` of one family restricted to `part`.
pub fn apply_family(family: KernelFamily, part: Part, f: &SampledField) -> Result<SampledField> {
    apply_k(&table_for(family, part, f)?, f, DEFAULT_DELTA_STEPS)
}

/// The local region of a setting on the grid of `f`: `x/2 < y < 2x` on the
/// half-line, `|x − y| < ρ(x)` on the line.
pub fn local_region(f: &SampledField) -> Region {
    if f.grid().space().domain() == Domain::HalfLine {
        Region::Dyadic
    } else {
        Region::Critical
    }
}

/// `K(f)` for the Poisson semigroup of `setting`.
pub fn apply_k_setting(setting: &KernelSetting, f: &SampledField) -> Result<SampledField> {
    apply_family(KernelFamily::Poisson(*setting), Part::All, f)
}

fn require_line_setting_on_half_line(
    func: &'static str,
    setting: &KernelSetting,
    f: &SampledField,
) -> Result<()> {
    if setting.is_half_line() {
        return Err(Error::precondition(
            func,
            "K_± are defined for line settings",
        ));
    }
    if f.grid().space().domain() != Domain::HalfLine {
        return Err(Error::precondition(
            func,
            "field must live on a half-line grid",
        ));
    }
    Ok(())
}

/// `K₊(f)(t,x) = ∫_0^t ∫_0^∞ ∂_t P_{t−s}(x, y) f(s,y) dy ds` for `x > 0`.
pub fn apply_k_plus(setting: &KernelSetting, f: &SampledField) -> Result<SampledField> {
    require_line_setting_on_half_line("apply_k_plus", setting, f)?;
    apply_k_setting(setting, f)
}

/// `K₋(f)(t,x) = ∫_0^t ∫_0^∞ ∂_t P_{t−s}(x, −y) f(s,y) dy ds` for `x > 0`.
pub fn apply_k_minus(setting: &KernelSetting, f: &SampledField) -> Result<SampledField> {
    require_line_setting_on_half_line("apply_k_minus", setting, f)?;
    apply_family(KernelFamily::Reflected(*setting), Part::All, f)
}

/// `K^loc(f)` on the local region of the grid.
pub fn apply_k_local(setting: &KernelSetting, f: &SampledField) -> Result<SampledField> {
    apply_family(
        KernelFamily::Poisson(*setting),
        Part::Local(local_region(f)),
        f,
    )
}

/// `K^glob(f)`, the complement of [`apply_k_local`].
pub fn apply_k_global(setting: &KernelSetting, f: &SampledField) -> Result<SampledField> {
    apply_family(
        KernelFamily::Poisson(*setting),
        Part::Global(local_region(f)),
        f,
    )
}

/// A local difference operator applied to a field, with its pieces.
#[derive(Debug, Clone)]
pub struct DifferenceReport {
    pub total: SampledField,
    pub pieces: Vec<(&'static str, SampledField)>,
}

impl DifferenceReport {
    /// Relative `L²` distance between the total and the sum of the pieces.
    pub fn piece_defect(&self) -> Result<f64> {
        let Some((_, first)) = self.pieces.first() else {
            return Ok(0.0);
        };
        let mut sum = first.clone();
        for (_, p) in &self.pieces[1..] {
            sum = sum.combine(1.0, p, 1.0)?;
        }
        sum.relative_distance(&self.total)
    }
}

fn require_half_line(func: &'static str, f: &SampledField) -> Result<()> {
    if f.grid().space().domain() != Domain::HalfLine {
        return Err(Error::precondition(
            func,
            "field must live on a half-line grid",
        ));
    }
    Ok(())
}

/// `D^loc = K^loc(P^{S_α}) − K₊^loc(P)` on `x/2 < y < 2x`, with the pieces
/// `K₂^loc`, `D₁^loc`, `D₂^loc` and `D₃^loc`.
pub fn bessel_difference_local(alpha: f64, f: &SampledField) -> Result<DifferenceReport> {
    require_half_line("bessel_difference_local", f)?;
    let setting = KernelSetting::bessel(alpha)?;
    let part = Part::Local(Region::Dyadic);
    let total = apply_terms(
        &[
            (KernelFamily::Poisson(setting), 1.0),
            (KernelFamily::Poisson(KernelSetting::classical()), -1.0),
        ],
        part,
        f,
    )?;
    let piece = |p: BesselPiece| apply_family(KernelFamily::Bessel { alpha, piece: p }, part, f);
    let pieces = vec![
        ("k2", piece(BesselPiece::P2)?),
        ("d1", piece(BesselPiece::D1)?),
        ("d2", piece(BesselPiece::D2)?),
        ("d3", piece(BesselPiece::P13)?),
    ];
    Ok(DifferenceReport { total, pieces })
}

/// `𝒟^loc = K^loc(P^H) − K^loc(P_{·/√2})` on `|x − y| < ρ(x)`, split at heat
/// time `ρ(x)²` into the pieces `𝒟₁^loc` (below) and `𝒟₂^loc` (above).
pub fn hermite_difference_local(f: &SampledField) -> Result<DifferenceReport> {
    if f.grid().space().domain() != Domain::Line {
        return Err(Error::precondition(
            "hermite_difference_local",
            "field must live on a line grid",
        ));
    }
    let part = Part::Local(Region::Critical);
    let total = apply_terms(
        &[
            (KernelFamily::Poisson(KernelSetting::hermite()), 1.0),
            (
                KernelFamily::ScaledClassical {
                    c: std::f64::consts::FRAC_1_SQRT_2,
                },
                -1.0,
            ),
        ],
        part,
        f,
    )?;
    let pieces = vec![
        (
            "d1",
            apply_family(KernelFamily::HermiteSplit { large_u: false }, part, f)?,
        ),
        (
            "d2",
            apply_family(KernelFamily::HermiteSplit { large_u: true }, part, f)?,
        ),
    ];
    Ok(DifferenceReport { total, pieces })
}

/// `𝔇^loc = K₊^loc(P^H) − K^loc(P^{L_α^φ})` on `x/2 < y < 2x`.
pub fn laguerre_difference_local(alpha: f64, f: &SampledField) -> Result<DifferenceReport> {
    require_half_line("laguerre_difference_local", f)?;
    let setting = KernelSetting::laguerre(alpha)?;
    let total = apply_terms(
        &[
            (KernelFamily::Poisson(KernelSetting::hermite()), 1.0),
            (KernelFamily::Poisson(setting), -1.0),
        ],
        Part::Local(Region::Dyadic),
        f,
    )?;
    Ok(DifferenceReport {
        total,
        pieces: Vec::new(),
    })
}
