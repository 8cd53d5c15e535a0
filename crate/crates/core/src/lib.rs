pub mod agreement;
pub mod doc;
pub mod exactlp;
pub mod fixtures;
pub mod oracle;
pub mod order;
pub mod par;
pub mod testspace;
