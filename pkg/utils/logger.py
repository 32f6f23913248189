import logging
import sys


class Logger:

    def __init__(self, logdir, name, debug=False, summary=False, filename=None):
        self.logger = None
        self.type = 'None'
        self.name = name

        if summary:
            import tensorboardX
            self.logger = tensorboardX.SummaryWriter(logdir)
            self.type = 'tensorboardX'

        self.debug_flag = debug
        handlers = [logging.FileHandler(filename)] if filename else [logging.StreamHandler(sys.stderr)]
        logging.basicConfig(level=logging.DEBUG if debug else logging.INFO,
                            format=f'%(levelname)s:{name}: %(message)s', handlers=handlers, force=True)
        self._log = logging.getLogger(name)

        if summary:
            self._log.info(f"[!] starting logging at directory {logdir}")
        if self.debug_flag:
            self._log.info("[!] Entering DEBUG mode")

    def close(self):
        if self.logger is not None:
            self.logger.close()
        self.debug("Closing the Logger.")

    def add_scalar(self, tag, scalar_value, step=None):
        if self.type == 'tensorboardX':
            self.logger.add_scalar(tag, scalar_value, step)

    def add_table(self, tag, tbl, step=None):
        if self.type == 'tensorboardX':
            tbl_str = "<table width=\"100%\"> "
            tbl_str += "<tr> \
                     <th>Term</th> \
                     <th>Value</th> \
                     </tr>"
            for k, v in tbl.items():
                tbl_str += "<tr> \
                           <td>%s</td> \
                           <td>%s</td> \
                           </tr>" % (k, v)

            tbl_str += "</table>"
            self.logger.add_text(tag, tbl_str, step)

    def add_results(self, results):
        if self.type == 'tensorboardX':
            text = "<table width=\"100%\">"
            for k, res in results.items():
                text += f"<tr><td>{k}</td>" + " ".join([str(f'<td>{x}</td>') for x in res.values()]) + "</tr>"
            text += "</table>"
            self.logger.add_text("Results", text)

    def info(self, msg):
        self._log.info(msg)

    def debug(self, msg):
        if self.debug_flag:
            self._log.debug(msg)

    def warning(self, msg):
        self._log.warning(msg)

    def error(self, msg):
        self._log.error(msg)

    @property
    def stdlib(self):
        """The underlying logging.Logger, for code that takes a plain logger"""
        return self._log
