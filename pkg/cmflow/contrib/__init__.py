#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""
The cmflow.contrib namespace for code that supports the solver without being
part of it: closed-form test bodies, forward maps and constructors of
degenerate prescriptions, used as independent oracles by the tests and the
command line tool.
"""
