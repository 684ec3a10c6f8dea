// Text, positional and JSON forms of signed-digit numbers.
//
//   SD r=2 g=1 e=0 : 1 -1 0 -1          (line format, bit-exact)
//   1.[-1]0[-1]                          (positional, human-readable)
//   1.[-1]0|[-1]                         (positional with stable-prefix mark)
//   {"radix":2,"gamma":1,"msd_exponent":0,"digits":[1,-1,0,-1]}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{DigitSet, SdError, SignedDigitNumber};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseSdError {
    #[error("malformed signed-digit string: {0}")]
    Syntax(String),
    #[error(transparent)]
    Invalid(#[from] SdError),
}

impl fmt::Display for SignedDigitNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SD r={} g={} e={} :", self.digit_set.radix(), self.digit_set.gamma(), self.msd_exponent)?;
        for d in &self.digits {
            write!(f, " {d}")?;
        }
        Ok(())
    }
}

impl FromStr for SignedDigitNumber {
    type Err = ParseSdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = |why: &str| ParseSdError::Syntax(format!("{why} in `{s}`"));
        let rest = s.strip_prefix("SD ").ok_or_else(|| syntax("missing `SD ` tag"))?;
        let (header, body) = rest.split_once(" :").ok_or_else(|| syntax("missing ` :`"))?;
        let mut fields = header.split(' ');
        let mut field = |key: &str| -> Result<&str, ParseSdError> {
            fields.next().and_then(|f| f.strip_prefix(key)).ok_or_else(|| syntax(&format!("expected `{key}`")))
        };
        let radix: u32 = field("r=")?.parse().map_err(|_| syntax("bad radix"))?;
        let gamma: u32 = field("g=")?.parse().map_err(|_| syntax("bad gamma"))?;
        let e: i64 = field("e=")?.parse().map_err(|_| syntax("bad exponent"))?;
        if fields.next().is_some() {
            return Err(syntax("trailing header fields"));
        }
        let mut digits = Vec::new();
        for tok in body.split(' ') {
            if tok.is_empty() {
                // only the single separator after ':' is allowed
                if !digits.is_empty() || body.starts_with("  ") {
                    return Err(syntax("extra whitespace"));
                }
                continue;
            }
            digits.push(tok.parse::<i32>().map_err(|_| syntax("bad digit"))?);
        }
        let ds = DigitSet::new(radix, gamma)?;
        Ok(SignedDigitNumber::new(ds, e, digits)?)
    }
}

fn push_digit(out: &mut String, d: i32) {
    if (0..10).contains(&d) {
        out.push(char::from(b'0' + d as u8));
    } else {
        out.push_str(&format!("[{d}]"));
    }
}

impl SignedDigitNumber {
    /// Positional rendering: digits left to right with a `.` after the units
    /// digit; negative or multi-character digits go in brackets, e.g.
    /// `1.[-1][-1][-1]`. Numbers whose first digit sits below `r^-1` fall
    /// back to the line format.
    pub fn to_positional(&self) -> String {
        self.to_positional_marked(None)
    }

    /// Positional rendering with a `|` after the first `stable` digits.
    pub fn to_positional_marked(&self, stable: Option<usize>) -> String {
        if self.msd_exponent < -1 {
            return self.to_string();
        }
        let units = (self.msd_exponent + 1) as usize;
        let mut out = String::new();
        for (i, &d) in self.digits.iter().enumerate() {
            if i == units {
                out.push('.');
            }
            if stable == Some(i) {
                out.push('|');
            }
            push_digit(&mut out, d);
        }
        if units == self.digits.len() {
            out.push('.');
        }
        if stable == Some(self.digits.len()) {
            out.push('|');
        }
        out
    }

    /// Parses the positional form (a `|` marker, if present, is ignored).
    /// The number of digits before the `.` fixes the msd exponent.
    pub fn parse_positional(s: &str, digit_set: DigitSet) -> Result<SignedDigitNumber, ParseSdError> {
        let syntax = |why: &str| ParseSdError::Syntax(format!("{why} in `{s}`"));
        let mut digits = Vec::new();
        let mut units: Option<usize> = None;
        let mut chars = s.trim().chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                '.' => {
                    if units.replace(digits.len()).is_some() {
                        return Err(syntax("second radix point"));
                    }
                }
                '|' => {}
                '0'..='9' => digits.push(c as i32 - '0' as i32),
                '[' => {
                    let mut tok = String::new();
                    loop {
                        match chars.next() {
                            Some(']') => break,
                            Some(ch) => tok.push(ch),
                            None => return Err(syntax("unclosed `[`")),
                        }
                    }
                    digits.push(tok.parse().map_err(|_| syntax("bad bracketed digit"))?);
                }
                _ => return Err(syntax("unexpected character")),
            }
        }
        let units = units.unwrap_or(digits.len());
        Ok(SignedDigitNumber::new(digit_set, units as i64 - 1, digits)?)
    }
}

/// JSON wire form of a [`SignedDigitNumber`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdJson {
    pub radix: u32,
    pub gamma: u32,
    pub msd_exponent: i64,
    pub digits: Vec<i32>,
}

impl From<&SignedDigitNumber> for SdJson {
    fn from(x: &SignedDigitNumber) -> Self {
        SdJson {
            radix: x.digit_set.radix(),
            gamma: x.digit_set.gamma(),
            msd_exponent: x.msd_exponent,
            digits: x.digits.clone(),
        }
    }
}

impl TryFrom<SdJson> for SignedDigitNumber {
    type Error = SdError;
    fn try_from(j: SdJson) -> Result<Self, SdError> {
        SignedDigitNumber::new(DigitSet::new(j.radix, j.gamma)?, j.msd_exponent, j.digits)
    }
}

impl Serialize for SignedDigitNumber {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SdJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SignedDigitNumber {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = SdJson::deserialize(deserializer)?;
        SignedDigitNumber::try_from(raw).map_err(serde::de::Error::custom)
    }
}
