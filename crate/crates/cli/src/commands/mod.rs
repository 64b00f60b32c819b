pub mod common;
pub mod evaluate;
pub mod featurize;
pub mod humanize_cmd;
pub mod judge;
pub mod prepare;
pub mod report;
pub mod score_contrast;
pub mod score_ppl;
pub mod shift_cmd;
pub mod train_clf;
