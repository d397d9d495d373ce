#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""Common code shared between the cmflow sub modules."""

import logging as _logging

#: Geometry identifier for the full two-sphere (theta, phi) grid.
FULL_S2 = 'fulls2'

#: Geometry identifier for axially symmetric profiles on S^n.
AXISYM = 'axisym'

#: Smallest value of p_k accepted before declaring convexity lost.
P_FLOOR = 1e-12

#-----------------------------------------------------------------------------
#   Custom exceptions.
#-----------------------------------------------------------------------------
class CMFlowError(Exception):
    """
    Base class of all errors raised by cmflow.
    """
    pass


class ConfigurationError(CMFlowError):
    """
    An Exception indicating an invalid grid resolution or run configuration.
    """
    pass


class GridMismatchError(CMFlowError):
    """
    An Exception indicating that fields living on different grids were
    combined.
    """
    pass


class ConvexityLostError(CMFlowError):
    """
    An Exception indicating that a support function is no longer strictly
    convex (a principal radius or p_k dropped to zero or below).
    """
    def __init__(self, message, margin=None):
        super(ConvexityLostError, self).__init__(message)
        self.margin = margin


class StepFailureError(CMFlowError):
    """
    An Exception indicating that the time step underflowed while retrying a
    rejected step.
    """
    pass


class ConvergenceError(CMFlowError):
    """
    An Exception indicating that an iteration or a flow run stopped before
    meeting its tolerance.
    """
    def __init__(self, message, state=None, tau=None):
        super(ConvergenceError, self).__init__(message)
        self.state = state
        self.tau = tau


class InadmissiblePrescriptionError(CMFlowError):
    """
    An Exception indicating that a prescribed function cannot be the p_k of a
    strictly convex body (non-positive samples or a failed admissibility
    check).
    """
    pass


class SnapshotError(CMFlowError):
    """
    An Exception indicating that a snapshot document does not match the
    expected format version, geometry or resolution.
    """
    pass


#-----------------------------------------------------------------------------
#   Publish/subscribe plumbing for diagnostics streams.
#-----------------------------------------------------------------------------
class Subscriber(object):
    """
    An abstract class defining the interface expected by a Publisher.
    """

    def update(self, data):
        """
        A callback method used by a Publisher to notify this Subscriber about
        a new diagnostics record.

        :param data: the object published, usually a `DiagnosticsRecord`.
        """
        raise NotImplementedError('cannot invoke virtual method!')


class LoggingSubscriber(Subscriber):
    """
    A concrete Subscriber writing one log line per record received.

    Useful as a progress monitor for long runs.
    """

    def __init__(self, logger=None, level=_logging.INFO):
        """
        Constructor.

        :param logger: a `logging.Logger`. Default: the ``cmflow`` logger.

        :param level: the level the lines are logged at.
        """
        self.logger = logger or _logging.getLogger('cmflow')
        self.level = level

    def update(self, data):
        self.logger.log(self.level, '%s', data)


class Publisher(object):
    """
    A 'push' Publisher that maintains a list of Subscriber objects, notifying
    them whenever a new record is produced.
    """

    def __init__(self):
        """Constructor"""
        self.subscribers = []

    def attach(self, subscriber):
        """
        Add a new subscriber.

        :param subscriber: an object implementing the Subscriber interface.
        """
        if callable(getattr(subscriber, 'update', None)):
            if subscriber not in self.subscribers:
                self.subscribers.append(subscriber)
        else:
            raise TypeError('%r does not support required interface!' % (subscriber,))

    def detach(self, subscriber):
        """
        Remove an existing subscriber. Unknown subscribers are ignored.

        :param subscriber: a previously attached subscriber.
        """
        try:
            self.subscribers.remove(subscriber)
        except ValueError:
            pass

    def notify(self, data):
        """
        Send a record to all registered Subscribers.

        :param data: the record to be passed to each registered Subscriber.
        """
        for subscriber in self.subscribers:
            subscriber.update(data)
