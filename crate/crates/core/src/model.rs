//! Ledger domain types: dealers, rupee amounts held as integer paise,
//! second-precision timestamps, and the taxed-sale transaction record,
//! plus CSV ingestion and serialization for ledger files.

use std::collections::HashSet;
use std::fmt;
use std::io;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Column order every ledger file must carry in its header row.
pub const CSV_HEADER: [&str; 5] = ["serial", "seller_id", "buyer_id", "time", "value_rupees"];

// ---------------------------------------------------------------------------
// Dealer identifiers
// ---------------------------------------------------------------------------

/// Why a string cannot be used as a dealer id.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidDealerId {
    #[error("dealer id is empty")]
    Empty,
    #[error("dealer id {0:?} contains a forbidden character (comma, quote, or newline)")]
    ForbiddenChar(String),
}

/// Opaque dealer identifier, exactly as it appears in the ledger.
///
/// Non-empty and free of CSV-hostile characters so ids round-trip through
/// every output format unquoted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DealerId(String);

impl DealerId {
    pub fn new(id: impl Into<String>) -> Result<Self, InvalidDealerId> {
        let id = id.into();
        if id.is_empty() {
            return Err(InvalidDealerId::Empty);
        }
        if id.chars().any(|c| matches!(c, ',' | '"' | '\n' | '\r')) {
            return Err(InvalidDealerId::ForbiddenChar(id));
        }
        Ok(DealerId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DealerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for DealerId {
    type Err = InvalidDealerId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DealerId::new(s)
    }
}

impl TryFrom<String> for DealerId {
    type Error = InvalidDealerId;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        DealerId::new(s)
    }
}

impl From<DealerId> for String {
    fn from(id: DealerId) -> String {
        id.0
    }
}

// ---------------------------------------------------------------------------
// Money
// ---------------------------------------------------------------------------

/// Why a decimal rupee string failed to parse.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoneyParseError {
    #[error("malformed rupee amount {0:?}: expected digits with at most two fraction digits")]
    Malformed(String),
    #[error("negative rupee amount {0:?}")]
    Negative(String),
    #[error("rupee amount {0:?} is out of range")]
    OutOfRange(String),
}

/// A non-negative rupee amount stored as whole paise (1 rupee = 100 paise).
///
/// All arithmetic is exact integer arithmetic; there is no floating point
/// anywhere in the money path.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Money(u64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub const fn from_paise(paise: u64) -> Self {
        Money(paise)
    }

    /// Whole-rupee constructor; panics on overflow (beyond ~1.8e17 rupees).
    pub const fn from_rupees(rupees: u64) -> Self {
        Money(rupees * 100)
    }

    pub const fn paise(self) -> u64 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn checked_add(self, other: Money) -> Option<Money> {
        self.0.checked_add(other.0).map(Money)
    }

    pub fn checked_sub(self, other: Money) -> Option<Money> {
        self.0.checked_sub(other.0).map(Money)
    }

    /// Parses a decimal rupee amount: digits with an optional `.` and at most
    /// two fraction digits. Rejects negative amounts, but parses zero (the
    /// ledger layer decides whether zero rows are acceptable).
    pub fn parse_rupees(s: &str) -> Result<Money, MoneyParseError> {
        if let Some(rest) = s.strip_prefix('-') {
            // Only call it "negative" when the remainder would otherwise parse.
            if Money::parse_rupees(rest).is_ok() {
                return Err(MoneyParseError::Negative(s.to_string()));
            }
            return Err(MoneyParseError::Malformed(s.to_string()));
        }
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (s, None),
        };
        if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(MoneyParseError::Malformed(s.to_string()));
        }
        let frac_paise = match frac_part {
            None => 0,
            Some(f) if f.len() == 1 && f.bytes().all(|b| b.is_ascii_digit()) => {
                u64::from(f.as_bytes()[0] - b'0') * 10
            }
            Some(f) if f.len() == 2 && f.bytes().all(|b| b.is_ascii_digit()) => {
                u64::from(f.as_bytes()[0] - b'0') * 10 + u64::from(f.as_bytes()[1] - b'0')
            }
            Some(_) => return Err(MoneyParseError::Malformed(s.to_string())),
        };
        let rupees: u64 = int_part
            .parse()
            .map_err(|_| MoneyParseError::OutOfRange(s.to_string()))?;
        rupees
            .checked_mul(100)
            .and_then(|p| p.checked_add(frac_paise))
            .map(Money)
            .ok_or_else(|| MoneyParseError::OutOfRange(s.to_string()))
    }

    /// Canonical decimal rupee form: whole rupees bare (`"150"`), otherwise
    /// exactly two fraction digits (`"150.05"`).
    pub fn format_rupees(self) -> String {
        if self.0.is_multiple_of(100) {
            format!("{}", self.0 / 100)
        } else {
            format!("{}.{:02}", self.0 / 100, self.0 % 100)
        }
    }

    /// Rupee form with Indian digit grouping, e.g. `₹12,34,567.50`.
    pub fn format_indian(self) -> String {
        let grouped = group_indian(self.0 / 100);
        if self.0.is_multiple_of(100) {
            format!("₹{grouped}")
        } else {
            format!("₹{grouped}.{:02}", self.0 % 100)
        }
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "₹{}", self.format_rupees())
    }
}

// Indian grouping: rightmost group of three, then groups of two.
fn group_indian(n: u64) -> String {
    let digits = n.to_string();
    if digits.len() <= 3 {
        return digits;
    }
    let (head, tail) = digits.split_at(digits.len() - 3);
    let mut groups = Vec::new();
    let bytes = head.as_bytes();
    let mut end = bytes.len();
    while end > 0 {
        let start = end.saturating_sub(2);
        groups.push(&head[start..end]);
        end = start;
    }
    groups.reverse();
    format!("{},{}", groups.join(","), tail)
}

/// A signed paise amount, used for net tax positions (refunds are negative).
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SignedMoney(i64);

impl SignedMoney {
    pub const ZERO: SignedMoney = SignedMoney(0);

    pub const fn from_paise(paise: i64) -> Self {
        SignedMoney(paise)
    }

    pub const fn paise(self) -> i64 {
        self.0
    }

    pub fn checked_add(self, other: SignedMoney) -> Option<SignedMoney> {
        self.0.checked_add(other.0).map(SignedMoney)
    }

    pub fn checked_sub(self, other: SignedMoney) -> Option<SignedMoney> {
        self.0.checked_sub(other.0).map(SignedMoney)
    }

    /// Indian-grouped rupee form with a leading sign for refunds, e.g. `-₹200`.
    pub fn format_indian(self) -> String {
        let magnitude = Money::from_paise(self.0.unsigned_abs()).format_indian();
        if self.0 < 0 {
            format!("-{magnitude}")
        } else {
            magnitude
        }
    }
}

impl fmt::Display for SignedMoney {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = Money::from_paise(self.0.unsigned_abs());
        if self.0 < 0 {
            write!(f, "-{m}")
        } else {
            write!(f, "{m}")
        }
    }
}

/// Net tax a dealer owes for one reporting slice: output tax collected on
/// sales minus input tax already paid on purchases. Negative means the
/// dealer is owed a refund.
pub fn tax_payable(output_collected: Money, input_paid: Money) -> SignedMoney {
    let out = i64::try_from(output_collected.paise()).expect("output tax exceeds i64 paise");
    let inp = i64::try_from(input_paid.paise()).expect("input tax exceeds i64 paise");
    SignedMoney(out - inp)
}

// ---------------------------------------------------------------------------
// Timestamps
// ---------------------------------------------------------------------------

/// Why a timestamp string failed to parse.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed timestamp {0:?}: expected Y/m/d/H:M:S or Y-m-dTH:M:S")]
pub struct InvalidTimestamp(String);

const SLASH_FORMAT: &str = "%Y/%m/%d/%H:%M:%S";
const ISO_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

/// A second-precision wall-clock timestamp.
///
/// Parses both the raw ledger form `2015/01/14/13:01:54` and the ISO form
/// `2015-01-14T13:01:54`; always prints the ISO form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(NaiveDateTime);

impl Timestamp {
    pub fn parse(s: &str) -> Result<Self, InvalidTimestamp> {
        NaiveDateTime::parse_from_str(s, SLASH_FORMAT)
            .or_else(|_| NaiveDateTime::parse_from_str(s, ISO_FORMAT))
            .map(Timestamp)
            .map_err(|_| InvalidTimestamp(s.to_string()))
    }

    pub fn from_ymd_hms(y: i32, mo: u32, d: u32, h: u32, mi: u32, s: u32) -> Option<Self> {
        NaiveDate::from_ymd_opt(y, mo, d)?
            .and_hms_opt(h, mi, s)
            .map(Timestamp)
    }

    pub fn from_unix_seconds(secs: i64) -> Option<Self> {
        DateTime::from_timestamp(secs, 0).map(|dt| Timestamp(dt.naive_utc()))
    }

    pub fn unix_seconds(self) -> i64 {
        self.0.and_utc().timestamp()
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format(ISO_FORMAT))
    }
}

impl FromStr for Timestamp {
    type Err = InvalidTimestamp;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Timestamp::parse(s)
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Timestamp::parse(&s).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Transactions
// ---------------------------------------------------------------------------

/// One taxed sale: `seller` sold to `buyer` at `time`, and `value` is the tax
/// the buyer handed over with the purchase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub serial: u64,
    pub seller: DealerId,
    pub buyer: DealerId,
    pub time: Timestamp,
    pub value: Money,
}

impl Transaction {
    pub fn new(
        serial: u64,
        seller: DealerId,
        buyer: DealerId,
        time: Timestamp,
        value: Money,
    ) -> Result<Self, RowError> {
        if serial == 0 {
            return Err(RowError::Malformed {
                reason: "serial must be a positive integer".to_string(),
            });
        }
        if seller == buyer {
            return Err(RowError::SelfLoop { dealer: seller });
        }
        if value.is_zero() {
            return Err(RowError::ZeroValue);
        }
        Ok(Transaction {
            serial,
            seller,
            buyer,
            time,
            value,
        })
    }
}

// ---------------------------------------------------------------------------
// Ledger parsing
// ---------------------------------------------------------------------------

/// Why a single ledger row was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RowError {
    #[error("malformed row: {reason}")]
    Malformed { reason: String },
    #[error("seller and buyer are the same dealer ({dealer})")]
    SelfLoop { dealer: DealerId },
    #[error("duplicate transaction: {seller} -> {buyer} at {time} already seen")]
    DuplicateKey {
        seller: DealerId,
        buyer: DealerId,
        time: Timestamp,
    },
    #[error("negative value ({raw})")]
    NegativeValue { raw: String },
    #[error("zero-valued transaction")]
    ZeroValue,
}

/// Why the ledger as a whole could not be read.
#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("bad header: expected {expected:?}, found {found:?}")]
    Header { expected: String, found: String },
    #[error("line {line}: {error}")]
    Row { line: u64, error: RowError },
    #[error("ledger I/O: {0}")]
    Io(#[from] io::Error),
}

/// Supported on-disk ledger encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LedgerFormat {
    Csv,
}

/// Strict fails on the first bad row; lenient skips bad rows and reports them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    Strict,
    Lenient,
}

/// A row skipped in lenient mode, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowDiagnostic {
    pub line: u64,
    pub error: RowError,
}

/// Result of reading a ledger: transactions sorted by (time, serial), plus
/// whatever lenient mode had to skip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedLedger {
    pub transactions: Vec<Transaction>,
    pub skipped: Vec<RowDiagnostic>,
}

/// Reads a ledger stream, validates every row, and returns the transactions
/// sorted chronologically (ties broken by serial, then input order).
///
/// Rejected rows carry their line number; duplicates are judged on the
/// `(seller, buyer, time)` identity that the graph layer also uses.
pub fn parse_ledger<R: io::Read>(
    source: R,
    format: LedgerFormat,
    mode: ParseMode,
) -> Result<ParsedLedger, LedgerError> {
    let LedgerFormat::Csv = format;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::None)
        .from_reader(source);

    {
        let headers = reader.headers().map_err(csv_to_ledger_error)?;
        let found: Vec<&str> = headers.iter().collect();
        if found != CSV_HEADER {
            return Err(LedgerError::Header {
                expected: CSV_HEADER.join(","),
                found: found.join(","),
            });
        }
    }

    let mut transactions = Vec::new();
    let mut skipped = Vec::new();
    let mut seen: HashSet<(DealerId, DealerId, Timestamp)> = HashSet::new();

    for record in reader.records() {
        let (line, parsed) = match record {
            Ok(rec) => {
                let line = rec.position().map_or(0, |p| p.line());
                (line, parse_row(&rec, &mut seen))
            }
            Err(err) => {
                let line = err.position().map_or(0, |p| p.line());
                (
                    line,
                    Err(RowError::Malformed {
                        reason: err.to_string(),
                    }),
                )
            }
        };
        match (parsed, mode) {
            (Ok(tx), _) => transactions.push(tx),
            (Err(error), ParseMode::Strict) => return Err(LedgerError::Row { line, error }),
            (Err(error), ParseMode::Lenient) => skipped.push(RowDiagnostic { line, error }),
        }
    }

    // Stable sort: rows sharing (time, serial) keep their file order.
    transactions.sort_by_key(|t| (t.time, t.serial));
    Ok(ParsedLedger {
        transactions,
        skipped,
    })
}

fn csv_to_ledger_error(err: csv::Error) -> LedgerError {
    if let csv::ErrorKind::Io(_) = err.kind() {
        match err.into_kind() {
            csv::ErrorKind::Io(io_err) => LedgerError::Io(io_err),
            _ => unreachable!(),
        }
    } else {
        LedgerError::Header {
            expected: CSV_HEADER.join(","),
            found: err.to_string(),
        }
    }
}

fn parse_row(
    rec: &csv::StringRecord,
    seen: &mut HashSet<(DealerId, DealerId, Timestamp)>,
) -> Result<Transaction, RowError> {
    if rec.len() != CSV_HEADER.len() {
        return Err(RowError::Malformed {
            reason: format!("expected {} fields, found {}", CSV_HEADER.len(), rec.len()),
        });
    }
    let serial: u64 = rec[0].parse().map_err(|_| RowError::Malformed {
        reason: format!("bad serial {:?}", &rec[0]),
    })?;
    let seller = DealerId::new(&rec[1]).map_err(|e| RowError::Malformed {
        reason: format!("bad seller_id: {e}"),
    })?;
    let buyer = DealerId::new(&rec[2]).map_err(|e| RowError::Malformed {
        reason: format!("bad buyer_id: {e}"),
    })?;
    let time = Timestamp::parse(&rec[3]).map_err(|e| RowError::Malformed {
        reason: e.to_string(),
    })?;
    let value = match Money::parse_rupees(&rec[4]) {
        Ok(v) => v,
        Err(MoneyParseError::Negative(raw)) => return Err(RowError::NegativeValue { raw }),
        Err(e) => {
            return Err(RowError::Malformed {
                reason: e.to_string(),
            })
        }
    };
    let tx = Transaction::new(serial, seller, buyer, time, value)?;
    let key = (tx.seller.clone(), tx.buyer.clone(), tx.time);
    if !seen.insert(key) {
        return Err(RowError::DuplicateKey {
            seller: tx.seller,
            buyer: tx.buyer,
            time: tx.time,
        });
    }
    Ok(tx)
}

/// Writes transactions back out in the canonical CSV form (ISO timestamps,
/// canonical rupee amounts).
pub fn serialize_ledger<W: io::Write>(transactions: &[Transaction], writer: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for tx in transactions {
        w.write_record([
            tx.serial.to_string(),
            tx.seller.as_str().to_string(),
            tx.buyer.as_str().to_string(),
            tx.time.to_string(),
            tx.value.format_rupees(),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> DealerId {
        DealerId::new(s).unwrap()
    }

    fn ts(s: &str) -> Timestamp {
        Timestamp::parse(s).unwrap()
    }

    #[test]
    fn dealer_id_rejects_empty_and_csv_hostile_chars() {
        assert_eq!(DealerId::new(""), Err(InvalidDealerId::Empty));
        for bad in ["a,b", "a\"b", "a\nb", "a\rb"] {
            assert!(matches!(
                DealerId::new(bad),
                Err(InvalidDealerId::ForbiddenChar(_))
            ));
        }
        assert_eq!(d("dealer_07").as_str(), "dealer_07");
    }

    #[test]
    fn money_parses_whole_and_fractional_rupees() {
        assert_eq!(Money::parse_rupees("15000").unwrap(), Money::from_paise(1_500_000));
        assert_eq!(Money::parse_rupees("8.5").unwrap(), Money::from_paise(850));
        assert_eq!(Money::parse_rupees("8.50").unwrap(), Money::from_paise(850));
        assert_eq!(Money::parse_rupees("0.05").unwrap(), Money::from_paise(5));
        assert_eq!(Money::parse_rupees("0").unwrap(), Money::ZERO);
    }

    #[test]
    fn money_rejects_bad_forms() {
        for bad in ["", ".", "8.", ".5", "8.505", "1e3", "12a", "8,5", " 8"] {
            assert!(
                matches!(Money::parse_rupees(bad), Err(MoneyParseError::Malformed(_))),
                "{bad:?} should be malformed"
            );
        }
        assert!(matches!(
            Money::parse_rupees("-3"),
            Err(MoneyParseError::Negative(_))
        ));
        assert!(matches!(
            Money::parse_rupees("-3.50"),
            Err(MoneyParseError::Negative(_))
        ));
        assert!(matches!(
            Money::parse_rupees("99999999999999999999"),
            Err(MoneyParseError::OutOfRange(_))
        ));
    }

    #[test]
    fn money_formats_canonically() {
        assert_eq!(Money::from_paise(1_500_000).format_rupees(), "15000");
        assert_eq!(Money::from_paise(850).format_rupees(), "8.50");
        assert_eq!(Money::from_paise(5).format_rupees(), "0.05");
        assert_eq!(Money::ZERO.format_rupees(), "0");
        assert_eq!(Money::from_paise(850).to_string(), "₹8.50");
    }

    #[test]
    fn money_formats_with_indian_grouping() {
        assert_eq!(Money::from_rupees(0).format_indian(), "₹0");
        assert_eq!(Money::from_rupees(999).format_indian(), "₹999");
        assert_eq!(Money::from_rupees(1_000).format_indian(), "₹1,000");
        // One lakh.
        assert_eq!(Money::from_rupees(100_000).format_indian(), "₹1,00,000");
        assert_eq!(Money::from_rupees(1_234_567).format_indian(), "₹12,34,567");
        assert_eq!(Money::from_paise(123_456_750).format_indian(), "₹12,34,567.50");
        assert_eq!(SignedMoney::from_paise(-20_000).format_indian(), "-₹200");
    }

    #[test]
    fn tax_payable_matches_the_vat_chain() {
        // Producer collects ₹120 selling on, paid nothing upstream.
        assert_eq!(
            tax_payable(Money::from_rupees(120), Money::ZERO),
            SignedMoney::from_paise(12_000)
        );
        // Manufacturer: collected ₹180, already paid ₹120 -> owes ₹60.
        assert_eq!(
            tax_payable(Money::from_rupees(180), Money::from_rupees(120)),
            SignedMoney::from_paise(6_000)
        );
        // Retailer: collected ₹200, paid ₹180 -> owes ₹20.
        assert_eq!(
            tax_payable(Money::from_rupees(200), Money::from_rupees(180)),
            SignedMoney::from_paise(2_000)
        );
        // End consumer: paid ₹200, collected nothing -> refund position.
        assert_eq!(
            tax_payable(Money::ZERO, Money::from_rupees(200)),
            SignedMoney::from_paise(-20_000)
        );
        assert_eq!(tax_payable(Money::ZERO, Money::ZERO), SignedMoney::ZERO);
    }

    #[test]
    fn timestamp_parses_both_forms_and_prints_iso() {
        let slash = ts("2015/01/14/13:01:54");
        let iso = ts("2015-01-14T13:01:54");
        assert_eq!(slash, iso);
        assert_eq!(slash.to_string(), "2015-01-14T13:01:54");
        assert!(ts("2015/01/14/10:30:44") < slash);
        assert!(Timestamp::parse("2015-01-14 13:01:54").is_err());
        assert!(Timestamp::parse("2015/13/40/99:99:99").is_err());
    }

    #[test]
    fn timestamp_serde_round_trips_as_string() {
        let t = ts("2015-01-16T10:10:10");
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, "\"2015-01-16T10:10:10\"");
        assert_eq!(serde_json::from_str::<Timestamp>(&json).unwrap(), t);
    }

    #[test]
    fn transaction_rejects_self_loops_zero_values_and_serial_zero() {
        let t = ts("2015-01-14T10:30:44");
        assert!(matches!(
            Transaction::new(1, d("m"), d("m"), t, Money::from_rupees(10)),
            Err(RowError::SelfLoop { .. })
        ));
        assert!(matches!(
            Transaction::new(1, d("m"), d("n"), t, Money::ZERO),
            Err(RowError::ZeroValue)
        ));
        assert!(matches!(
            Transaction::new(0, d("m"), d("n"), t, Money::from_rupees(10)),
            Err(RowError::Malformed { .. })
        ));
    }

    const SAMPLE: &str = "\
serial,seller_id,buyer_id,time,value_rupees
1,m,n,2015/01/14/10:30:44,10000
2,a,b,2015/01/14/13:01:54,15000
3,x,y,2015/01/15/09:02:52,12000
4,y,m,2015/01/15/10:09:11,14000
5,b,k,2015/01/16/10:10:10,10000
";

    #[test]
    fn parses_the_sample_ledger() {
        let parsed = parse_ledger(SAMPLE.as_bytes(), LedgerFormat::Csv, ParseMode::Strict).unwrap();
        assert!(parsed.skipped.is_empty());
        let serials: Vec<u64> = parsed.transactions.iter().map(|t| t.serial).collect();
        assert_eq!(serials, [1, 2, 3, 4, 5]);
        let second = &parsed.transactions[1];
        assert_eq!(second.seller, d("a"));
        assert_eq!(second.buyer, d("b"));
        assert_eq!(second.time, ts("2015-01-14T13:01:54"));
        assert_eq!(second.value, Money::from_rupees(15000));
    }

    #[test]
    fn sorts_rows_chronologically_with_serial_tiebreak() {
        let input = "\
serial,seller_id,buyer_id,time,value_rupees
7,c,e,2015/01/02/00:00:00,5
2,a,b,2015/01/01/00:00:00,5
5,b,d,2015/01/02/00:00:00,5
";
        let parsed = parse_ledger(input.as_bytes(), LedgerFormat::Csv, ParseMode::Strict).unwrap();
        let serials: Vec<u64> = parsed.transactions.iter().map(|t| t.serial).collect();
        assert_eq!(serials, [2, 5, 7]);
    }

    #[test]
    fn strict_mode_reports_the_offending_line() {
        let input = "\
serial,seller_id,buyer_id,time,value_rupees
1,a,b,2015/01/01/00:00:00,5
2,c,c,2015/01/02/00:00:00,5
";
        let err = parse_ledger(input.as_bytes(), LedgerFormat::Csv, ParseMode::Strict).unwrap_err();
        match err {
            LedgerError::Row { line, error } => {
                assert_eq!(line, 3);
                assert!(matches!(error, RowError::SelfLoop { .. }));
            }
            other => panic!("expected row error, got {other:?}"),
        }
    }

    #[test]
    fn lenient_mode_skips_and_diagnoses() {
        let input = "\
serial,seller_id,buyer_id,time,value_rupees
1,a,b,2015/01/01/00:00:00,5
2,c,c,2015/01/02/00:00:00,5
3,a,b,2015/01/01/00:00:00,9
4,d,e,2015/01/03/00:00:00,-2
5,d,e,2015/01/04/00:00:00,0
6,e,f,not-a-time,5
7,f,g,2015/01/05/00:00:00,5
";
        let parsed =
            parse_ledger(input.as_bytes(), LedgerFormat::Csv, ParseMode::Lenient).unwrap();
        assert_eq!(parsed.transactions.len(), 2);
        assert_eq!(parsed.skipped.len(), 5);
        let lines: Vec<u64> = parsed.skipped.iter().map(|s| s.line).collect();
        assert_eq!(lines, [3, 4, 5, 6, 7]);
        assert!(matches!(parsed.skipped[0].error, RowError::SelfLoop { .. }));
        assert!(matches!(parsed.skipped[1].error, RowError::DuplicateKey { .. }));
        assert!(matches!(parsed.skipped[2].error, RowError::NegativeValue { .. }));
        assert!(matches!(parsed.skipped[3].error, RowError::ZeroValue));
        assert!(matches!(parsed.skipped[4].error, RowError::Malformed { .. }));
    }

    #[test]
    fn rejects_a_wrong_header() {
        let input = "serial,seller,buyer,time,value\n1,a,b,2015/01/01/00:00:00,5\n";
        assert!(matches!(
            parse_ledger(input.as_bytes(), LedgerFormat::Csv, ParseMode::Strict),
            Err(LedgerError::Header { .. })
        ));
    }

    #[test]
    fn serializes_in_canonical_form() {
        let parsed = parse_ledger(SAMPLE.as_bytes(), LedgerFormat::Csv, ParseMode::Strict).unwrap();
        let mut out = Vec::new();
        serialize_ledger(&parsed.transactions, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("serial,seller_id,buyer_id,time,value_rupees\n"));
        assert!(text.contains("1,m,n,2015-01-14T10:30:44,10000\n"));
        // Canonical output re-parses to the same ledger.
        let reparsed =
            parse_ledger(text.as_bytes(), LedgerFormat::Csv, ParseMode::Strict).unwrap();
        assert_eq!(reparsed.transactions, parsed.transactions);
    }

    fn arb_money() -> impl Strategy<Value = Money> {
        (0u64..=2_000_000_000_000).prop_map(Money::from_paise)
    }

    proptest! {
        #[test]
        fn money_format_parse_round_trip(m in arb_money()) {
            prop_assert_eq!(Money::parse_rupees(&m.format_rupees()).unwrap(), m);
        }

        #[test]
        fn timestamp_display_parse_round_trip(secs in 0i64..4_000_000_000) {
            let t = Timestamp::from_unix_seconds(secs).unwrap();
            prop_assert_eq!(Timestamp::parse(&t.to_string()).unwrap(), t);
        }

        #[test]
        fn tax_payable_is_antisymmetric(a in arb_money(), b in arb_money()) {
            let forward = tax_payable(a, b);
            let backward = tax_payable(b, a);
            prop_assert_eq!(forward.paise(), -backward.paise());
        }

        #[test]
        fn parsed_ledgers_are_time_sorted(
            rows in proptest::collection::vec((1u64..50, 0i64..1000), 0..40)
        ) {
            let mut body = String::from("serial,seller_id,buyer_id,time,value_rupees\n");
            for (i, (value, offset)) in rows.iter().enumerate() {
                let t = Timestamp::from_unix_seconds(1_420_000_000 + offset).unwrap();
                // Distinct dealer pair per row keeps keys unique whatever the times are.
                body.push_str(&format!("{},s{},b{},{},{}\n", i + 1, i, i, t, value));
            }
            let parsed = parse_ledger(body.as_bytes(), LedgerFormat::Csv, ParseMode::Strict)?;
            prop_assert_eq!(parsed.transactions.len(), rows.len());
            for pair in parsed.transactions.windows(2) {
                prop_assert!((pair[0].time, pair[0].serial) <= (pair[1].time, pair[1].serial));
            }
        }
    }
}
