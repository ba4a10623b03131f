//! Publication records, free-text reference parsing and period slicing.

mod period;
mod record;
mod reference;

pub use period::{
    citation_periods, load_period_sets, slice_periods, text_periods, PeriodError, PeriodSets,
    PeriodSlices, PeriodSpec,
};
pub use record::{
    parse_records, write_jsonl, write_tabular, AuthorName, IngestError, InputFormat, ParsedCorpus,
    PublicationRecord, RowError, DEFAULT_YEAR_RANGE,
};
pub use reference::{
    normalize_text, parse_reference_string, Discard, RawReference, ReferenceTally,
};
