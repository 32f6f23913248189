from collections import namedtuple

import numpy as np
from sklearn.metrics import accuracy_score, f1_score, normalized_mutual_info_score


class Metrics(namedtuple('Metrics', ['accuracy', 'macro_f1', 'nmi'])):
    __slots__ = ()

    def to_report(self):
        return {"ACC": float(self.accuracy), "F1": float(self.macro_f1), "NMI": float(self.nmi)}


def compute_metrics(pred_labels, true_labels):
    """
    Accuracy, macro F1 over the union of both label sets (absent class scores
    0) and NMI normalized by the arithmetic mean of the two entropies, with
    0/0 taken as 0.
    """
    pred = np.asarray(pred_labels)
    true = np.asarray(true_labels)
    if pred.shape != true.shape:
        raise ValueError(f"label length mismatch: {pred.shape} vs {true.shape}")
    if pred.size == 0:
        raise ValueError("cannot score empty labelings")

    classes = np.union1d(pred, true)
    accuracy = accuracy_score(true, pred)
    macro_f1 = f1_score(true, pred, labels=classes, average='macro', zero_division=0)
    if len(np.unique(true)) == 1 and len(np.unique(pred)) == 1:
        nmi = 0.0
    else:
        nmi = normalized_mutual_info_score(true, pred, average_method='arithmetic')
    return Metrics(float(accuracy), float(macro_f1), float(nmi))


class _StreamMetrics(object):
    def __init__(self):
        """ Overridden by subclasses """
        pass

    def update(self, gt, pred):
        """ Overridden by subclasses """
        raise NotImplementedError()

    def get_results(self):
        """ Overridden by subclasses """
        raise NotImplementedError()

    def to_str(self, metrics):
        """ Overridden by subclasses """
        raise NotImplementedError()

    def reset(self):
        """ Overridden by subclasses """
        raise NotImplementedError()


class StreamClsMetrics(_StreamMetrics):
    """
    Stream Metrics for Node Classification
    """
    def __init__(self, n_classes):
        super().__init__()
        self.n_classes = n_classes
        self.reset()

    def update(self, label_trues, label_preds):
        label_trues = np.asarray(label_trues).ravel()
        label_preds = np.asarray(label_preds).ravel()
        self.confusion_matrix += self._fast_hist(label_trues, label_preds)
        self.trues.append(label_trues)
        self.preds.append(label_preds)
        self.total_samples += len(label_trues)

    def _fast_hist(self, label_true, label_pred):
        mask = (label_true >= 0) & (label_true < self.n_classes) & (label_pred >= 0) & (label_pred < self.n_classes)
        hist = np.bincount(
            self.n_classes * label_true[mask].astype(int) + label_pred[mask].astype(int),
            minlength=self.n_classes ** 2,
        ).reshape(self.n_classes, self.n_classes)
        return hist

    def accuracy(self):
        hist = self.confusion_matrix
        return float(np.diag(hist).sum() / hist.sum()) if hist.sum() else 0.0

    def get_results(self):
        """Returns the scores on everything seen since the last reset
            - overall accuracy, macro F1, NMI
            - per-class F1
        """
        metrics = compute_metrics(np.concatenate(self.preds), np.concatenate(self.trues))
        hist = self.confusion_matrix
        tp = np.diag(hist)
        denom = hist.sum(axis=0) + hist.sum(axis=1)
        cls_f1 = np.divide(2 * tp, denom, out=np.zeros(self.n_classes), where=denom > 0)
        return {
            "Total samples": self.total_samples,
            "Overall Acc": metrics.accuracy,
            "Macro F1": metrics.macro_f1,
            "NMI": metrics.nmi,
            "Class F1": dict(zip(range(self.n_classes), cls_f1.tolist())),
            "Metrics": metrics,
        }

    def to_str(self, results):
        string = "\n"
        for k, v in results.items():
            if k not in ("Class F1", "Metrics"):
                string += "%s: %f\n" % (k, v)
        string += 'Class F1:\n'
        for k, v in results['Class F1'].items():
            string += "\tclass %d: %s\n" % (k, str(v))
        return string

    def reset(self):
        self.confusion_matrix = np.zeros((self.n_classes, self.n_classes))
        self.trues = []
        self.preds = []
        self.total_samples = 0
