from .stream_metrics import StreamClsMetrics, Metrics, compute_metrics
