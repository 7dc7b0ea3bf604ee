//! Exact trace propagation along words.
//!
//! A two-generator subgroup of SL(2,R) is controlled by the traces
//! (x, y, z) = (tr A, tr B, tr AB). For a word W we keep the quadruple
//! (tr W, tr WA, tr WB, tr WAB) as exact field elements; appending a
//! generator updates the quadruple by Cayley-Hamilton substitutions
//! (A^2 = xA - 1, A^{-1} = x - A, and the trace identity
//! tr(UV) = tr U tr V - tr(U V^{-1})), so every word trace costs O(d^2)
//! field work and no matrix arithmetic.
//!
//! When the pair (A, B) is irreducible ({1, A, B, AB} spans the matrix
//! algebra, equivalently x^2+y^2+z^2-xyz-4 != 0), the quadruple determines
//! the group element in SL(2,R); up to a global sign it determines the
//! element in PSL(2,R). That makes quadruple equality an exact element test.

use crate::realfield::FieldElement;

/// Generator letters; lowercase letters are inverses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    A = 0,
    AInv = 1,
    B = 2,
    BInv = 3,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn from_index(i: u8) -> Letter {
        match i & 3 {
            0 => Letter::A,
            1 => Letter::AInv,
            2 => Letter::B,
            _ => Letter::BInv,
        }
    }

    pub fn glyph(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::AInv => 'a',
            Letter::B => 'B',
            Letter::BInv => 'b',
        }
    }

    pub fn from_glyph(c: char) -> Option<Letter> {
        match c {
            'A' => Some(Letter::A),
            'a' => Some(Letter::AInv),
            'B' => Some(Letter::B),
            'b' => Some(Letter::BInv),
            _ => None,
        }
    }
}

/// Packed word over the generator alphabet, up to 64 letters.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word {
    bits: u128,
    len: u8,
}

pub const WORD_CAPACITY: usize = 64;

impl Word {
    pub fn empty() -> Word {
        Word { bits: 0, len: 0 }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&self, l: Letter) -> Option<Word> {
        if self.len as usize >= WORD_CAPACITY {
            return None;
        }
        Some(Word {
            bits: self.bits | ((l as u128) << (2 * self.len)),
            len: self.len + 1,
        })
    }

    pub fn letter(&self, i: usize) -> Letter {
        Letter::from_index(((self.bits >> (2 * i)) & 3) as u8)
    }

    pub fn last(&self) -> Option<Letter> {
        if self.len == 0 {
            None
        } else {
            Some(self.letter(self.len as usize - 1))
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.len as usize).map(move |i| self.letter(i))
    }

    /// The reversed word with every letter inverted.
    pub fn inverse(&self) -> Word {
        let mut w = Word::empty();
        for i in (0..self.len as usize).rev() {
            w = w.push(self.letter(i).inverse()).unwrap();
        }
        w
    }

    /// Net exponent parity of (A, B), a homomorphism to (Z/2)^2.
    pub fn parity(&self) -> (u8, u8) {
        let mut pa = 0u8;
        let mut pb = 0u8;
        for l in self.letters() {
            match l {
                Letter::A | Letter::AInv => pa ^= 1,
                Letter::B | Letter::BInv => pb ^= 1,
            }
        }
        (pa, pb)
    }

    pub fn parse(s: &str) -> Option<Word> {
        if s == "e" {
            return Some(Word::empty());
        }
        let mut w = Word::empty();
        for c in s.chars() {
            w = w.push(Letter::from_glyph(c)?)?;
        }
        Some(w)
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            return write!(f, "e");
        }
        for l in self.letters() {
            write!(f, "{}", l.glyph())?;
        }
        Ok(())
    }
}

/// Render an arbitrary-length letter sequence.
pub fn letters_to_string(letters: &[Letter]) -> String {
    if letters.is_empty() {
        return "e".to_string();
    }
    letters.iter().map(|l| l.glyph()).collect()
}

/// Parse an arbitrary-length letter sequence ("e" is the empty word).
pub fn letters_from_string(s: &str) -> Option<Vec<Letter>> {
    if s == "e" {
        return Some(Vec::new());
    }
    s.chars().map(Letter::from_glyph).collect()
}

/// Reverse and invert a letter sequence.
pub fn letters_inverse(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.inverse()).collect()
}

impl std::fmt::Debug for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Exact traces (tr W, tr WA, tr WB, tr WAB).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TraceQuad {
    pub w: FieldElement,
    pub wa: FieldElement,
    pub wb: FieldElement,
    pub wab: FieldElement,
}

/// The trace coordinates of the generator pair, with products cached.
#[derive(Clone, Debug)]
pub struct TraceRules {
    pub x: FieldElement,
    pub y: FieldElement,
    pub z: FieldElement,
    xy: FieldElement,
}

impl TraceRules {
    pub fn new(x: FieldElement, y: FieldElement, z: FieldElement) -> TraceRules {
        let xy = x.checked_mul(&y).unwrap();
        TraceRules { x, y, z, xy }
    }

    /// Quadruple of the empty word: (2, x, y, z).
    pub fn identity_quad(&self) -> TraceQuad {
        let two = self.x.field().from_int(2);
        TraceQuad {
            w: two,
            wa: self.x.clone(),
            wb: self.y.clone(),
            wab: self.z.clone(),
        }
    }

    /// Quadruple of W*l from the quadruple of W.
    pub fn extend(&self, q: &TraceQuad, l: Letter) -> TraceQuad {
        let mul = |u: &FieldElement, v: &FieldElement| u.checked_mul(v).unwrap();
        let sub = |u: &FieldElement, v: &FieldElement| u.checked_sub(v).unwrap();
        let add = |u: &FieldElement, v: &FieldElement| u.checked_add(v).unwrap();
        match l {
            Letter::A => TraceQuad {
                // W' = WA: tr W'A = x tr(WA) - tr W (A^2 = xA - 1)
                w: q.wa.clone(),
                wa: sub(&mul(&self.x, &q.wa), &q.w),
                wb: q.wab.clone(),
                wab: sub(&mul(&self.x, &q.wab), &q.wb),
            },
            Letter::AInv => TraceQuad {
                // A^{-1} = x - A
                w: sub(&mul(&self.x, &q.w), &q.wa),
                wa: q.w.clone(),
                wb: sub(&mul(&self.x, &q.wb), &q.wab),
                wab: q.wb.clone(),
            },
            Letter::B => {
                // tr(WBA) = z tr W + y tr(WA) + x tr(WB) - xy tr W - tr(WAB)
                let wba = sub(
                    &add(
                        &add(&mul(&self.z, &q.w), &mul(&self.y, &q.wa)),
                        &mul(&self.x, &q.wb),
                    ),
                    &add(&mul(&self.xy, &q.w), &q.wab),
                );
                TraceQuad {
                    w: q.wb.clone(),
                    wa: wba,
                    wb: sub(&mul(&self.y, &q.wb), &q.w),
                    // tr(WBAB) = z tr(WB) - x tr W + tr(WA)
                    wab: add(&sub(&mul(&self.z, &q.wb), &mul(&self.x, &q.w)), &q.wa),
                }
            }
            Letter::BInv => {
                let wba = sub(
                    &add(
                        &add(&mul(&self.z, &q.w), &mul(&self.y, &q.wa)),
                        &mul(&self.x, &q.wb),
                    ),
                    &add(&mul(&self.xy, &q.w), &q.wab),
                );
                let wbab = add(&sub(&mul(&self.z, &q.wb), &mul(&self.x, &q.w)), &q.wa);
                TraceQuad {
                    // B^{-1} = y - B
                    w: sub(&mul(&self.y, &q.w), &q.wb),
                    wa: sub(&mul(&self.y, &q.wa), &wba),
                    wb: q.w.clone(),
                    wab: sub(&mul(&self.y, &q.wab), &wbab),
                }
            }
        }
    }

    /// Quadruple of an arbitrary word, extended from the identity.
    pub fn quad_of_word(&self, w: &Word) -> TraceQuad {
        let mut q = self.identity_quad();
        for l in w.letters() {
            q = self.extend(&q, l);
        }
        q
    }

    /// Quadruple of l*W from the quadruple of W (left extension).
    /// Derived from cyclicity tr(lW) = tr(Wl) and the same Cayley-Hamilton
    /// substitutions as the right rules.
    pub fn extend_left(&self, q: &TraceQuad, l: Letter) -> TraceQuad {
        let mul = |u: &FieldElement, v: &FieldElement| u.checked_mul(v).unwrap();
        let sub = |u: &FieldElement, v: &FieldElement| u.checked_sub(v).unwrap();
        let add = |u: &FieldElement, v: &FieldElement| u.checked_add(v).unwrap();
        // tr(WBA): Fricke rearrangement, shared by two cases below
        let wba = |q: &TraceQuad| {
            sub(
                &add(
                    &add(&mul(&self.z, &q.w), &mul(&self.y, &q.wa)),
                    &mul(&self.x, &q.wb),
                ),
                &add(&mul(&self.xy, &q.w), &q.wab),
            )
        };
        match l {
            Letter::A => TraceQuad {
                // V = AW: tr V = tr(WA); tr(VA) = tr(WA^2) = x tr(WA) - tr W;
                // tr(VB) = tr(WBA) hmm cyclic: tr(AWB) = tr(WBA);
                // tr(VAB) = tr(AWAB) = tr(WABA) = tr(WA) z - (y tr W - tr WB)
                w: q.wa.clone(),
                wa: sub(&mul(&self.x, &q.wa), &q.w),
                wb: wba(q),
                wab: sub(&mul(&q.wa, &self.z), &sub(&mul(&self.y, &q.w), &q.wb)),
            },
            Letter::AInv => {
                // A^{-1} = x - A applied on the left
                let v_w = sub(&mul(&self.x, &q.w), &q.wa);
                let v_wb = sub(&mul(&self.x, &q.wb), &wba(q));
                TraceQuad {
                    w: v_w,
                    wa: q.w.clone(),
                    wb: v_wb,
                    // tr(a W AB) = x tr(W AB) - tr(A W AB); tr(AWAB) as above
                    wab: sub(
                        &mul(&self.x, &q.wab),
                        &sub(&mul(&q.wa, &self.z), &sub(&mul(&self.y, &q.w), &q.wb)),
                    ),
                }
            }
            Letter::B => TraceQuad {
                // V = BW: tr V = tr(WB); tr(VA) = tr(BWA) = tr(WAB) of the
                // cycled word? no: tr(BWA) = tr(W AB) by cyclicity. wait:
                // tr(BWA) = tr(WAB) (cycle B to the back). yes.
                // tr(VB) = tr(WB^2) = y tr(WB) - tr W
                // tr(VAB) = tr(BWAB) = tr(WABB) = y tr(WAB) - tr(WA)
                w: q.wb.clone(),
                wa: q.wab.clone(),
                wb: sub(&mul(&self.y, &q.wb), &q.w),
                wab: sub(&mul(&self.y, &q.wab), &q.wa),
            },
            Letter::BInv => TraceQuad {
                // B^{-1} = y - B on the left
                w: sub(&mul(&self.y, &q.w), &q.wb),
                wa: sub(&mul(&self.y, &q.wa), &q.wab),
                wb: q.w.clone(),
                // tr(b W AB) = tr(W AB b) = tr(WA) by B b = 1? no:
                // tr(bWAB) = y tr(WAB) - tr(BWAB) = y tr(WAB) - (y tr(WAB) - tr(WA))
                wab: q.wa.clone(),
            },
        }
    }

    /// Quadruple of l * W * l^{-1} (conjugation by one generator letter).
    pub fn conjugate(&self, q: &TraceQuad, l: Letter) -> TraceQuad {
        let right = self.extend(q, l.inverse());
        self.extend_left(&right, l)
    }
}

impl TraceQuad {
    /// Sign-canonical form for PSL deduplication: the first nonzero
    /// coefficient across (w, wa, wb, wab) is made positive.
    pub fn canonical_psl(&self) -> TraceQuad {
        for el in [&self.w, &self.wa, &self.wb, &self.wab] {
            for c in el.coeffs() {
                use num_traits::Zero;
                if !c.is_zero() {
                    return if c < &crate::poly::Rat::zero() { self.negate() } else { self.clone() };
                }
            }
        }
        self.clone()
    }

    pub fn negate(&self) -> TraceQuad {
        TraceQuad {
            w: self.w.neg(),
            wa: self.wa.neg(),
            wb: self.wb.neg(),
            wab: self.wab.neg(),
        }
    }

    /// Equality as PSL(2,R) elements (irreducible generator pair assumed).
    pub fn same_psl_element(&self, other: &TraceQuad) -> bool {
        self.canonical_psl() == other.canonical_psl()
    }
}
