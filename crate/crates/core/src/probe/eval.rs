use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::LabelMap;

/// One-vs-rest scores per class plus the confusion matrix
/// (`confusion[truth][predicted]`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub confusion: Vec<Vec<u64>>,
    pub pixel_accuracy: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn evaluate_f1(pred: &LabelMap, gt: &LabelMap) -> Result<EvalReport> {
    pred.raster().ensure_dims(gt.dims())?;
    let l = pred.num_labels().max(gt.num_labels()) as usize;
    let mut confusion = vec![vec![0u64; l]; l];
    for (&p, &g) in pred.labels().iter().zip(gt.labels()) {
        confusion[g as usize][p as usize] += 1;
    }
    let mut precision = Vec::with_capacity(l);
    let mut recall = Vec::with_capacity(l);
    let mut f1 = Vec::with_capacity(l);
    for c in 0..l {
        let tp = confusion[c][c];
        let predicted: u64 = (0..l).map(|g| confusion[g][c]).sum();
        let actual: u64 = confusion[c].iter().sum();
        let (p, r) = (ratio(tp, predicted), ratio(tp, actual));
        precision.push(p);
        recall.push(r);
        f1.push(if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) });
    }
    let correct: u64 = (0..l).map(|c| confusion[c][c]).sum();
    Ok(EvalReport {
        precision,
        recall,
        f1,
        confusion,
        pixel_accuracy: ratio(correct, gt.labels().len() as u64),
    })
}

impl EvalReport {
    /// `class,precision,recall,f1` rows, six decimals.
    pub fn to_csv(&self, names: &[String]) -> Result<String> {
        self.check_names(names)?;
        let mut out = String::from("class,precision,recall,f1\n");
        for (i, name) in names.iter().enumerate() {
            out.push_str(&format!(
                "{name},{:.6},{:.6},{:.6}\n",
                self.precision[i], self.recall[i], self.f1[i]
            ));
        }
        Ok(out)
    }

    /// Square matrix with a header row of predicted classes and one row per true class.
    pub fn confusion_csv(&self, names: &[String]) -> Result<String> {
        self.check_names(names)?;
        let mut out = format!("truth\\pred,{}\n", names.join(","));
        for (i, name) in names.iter().enumerate() {
            let row: Vec<String> = self.confusion[i].iter().map(u64::to_string).collect();
            out.push_str(&format!("{name},{}\n", row.join(",")));
        }
        Ok(out)
    }

    fn check_names(&self, names: &[String]) -> Result<()> {
        if names.len() != self.f1.len() {
            return Err(Error::LengthMismatch {
                expected: self.f1.len(),
                found: names.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_prediction() {
        let gt = LabelMap::new(4, 1, vec![0, 1, 1, 3], 6).unwrap();
        let r = evaluate_f1(&gt, &gt).unwrap();
        for c in [0, 1, 3] {
            assert_eq!(r.f1[c], 1.0);
        }
        assert_eq!(r.f1[2], 0.0);
        assert_eq!(r.pixel_accuracy, 1.0);
        for (c, row) in r.confusion.iter().enumerate() {
            let support = gt.labels().iter().filter(|&&l| l as usize == c).count() as u64;
            assert_eq!(row.iter().sum::<u64>(), support);
        }
    }

    #[test]
    fn one_each_gives_half() {
        // class 1: TP at pixel 0, FP at pixel 1, FN at pixel 2
        let gt = LabelMap::new(3, 1, vec![1, 0, 1], 2).unwrap();
        let pred = LabelMap::new(3, 1, vec![1, 1, 0], 2).unwrap();
        let r = evaluate_f1(&pred, &gt).unwrap();
        assert_eq!((r.precision[1], r.recall[1], r.f1[1]), (0.5, 0.5, 0.5));
    }

    #[test]
    fn csv_layout() {
        let gt = LabelMap::new(2, 1, vec![0, 1], 2).unwrap();
        let r = evaluate_f1(&gt, &gt).unwrap();
        let names = vec!["a".to_string(), "b".to_string()];
        assert_eq!(
            r.to_csv(&names).unwrap(),
            "class,precision,recall,f1\na,1.000000,1.000000,1.000000\nb,1.000000,1.000000,1.000000\n"
        );
        assert_eq!(r.confusion_csv(&names).unwrap(), "truth\\pred,a,b\na,1,0\nb,0,1\n");
        assert!(r.to_csv(&names[..1]).is_err());
    }
}
